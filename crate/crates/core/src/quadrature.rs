//! Per-element quadrature dispatch: 2x2 Gauss for uncut elements, the
//! triangular-subcell baseline for cut elements, and the subcell-free scheme
//! that transplants disk rules onto sub-polygons through their SC maps.

use crate::geometry::{cross, signed_area, CutClass, ElementCut, Polygon};
use crate::mesh::Mesh;
use crate::sccm::{map_quadrature, ConformalMap, DiskRule, DiskRuleKind};
use crate::{Result, Vec2};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeTag {
    Standard,
    Subcell,
    Sccm,
}

/// Which cut-element scheme a run uses; uncut elements always take the
/// standard rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Subcell,
    Sccm(DiskRuleKind),
}

impl Scheme {
    pub fn parse(s: &str) -> Option<(Scheme, Option<&str>)> {
        match s {
            "subcell" => Some((Scheme::Subcell, None)),
            "sccm" => Some((Scheme::Sccm(DiskRuleKind::Midpoint), None)),
            _ => None,
        }
    }
}

/// One quadrature point in the dual form assembly consumes: parent
/// coordinates for shape evaluation plus the physical point and a weight
/// that already measures physical area.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub xi: f64,
    pub eta: f64,
    pub x: Vec2,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct QuadratureSet {
    pub elem: usize,
    pub scheme: SchemeTag,
    pub points: Vec<QuadPoint>,
}

impl QuadratureSet {
    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.w).sum()
    }
}

const GP: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

/// Degree-7 symmetric 13-point triangle rule (1+3+3+6 orbits). The centroid
/// weight is negative; this is the unique rule with this orbit structure.
/// Weights are normalized to sum to 1 and are scaled by triangle area below.
const TRI13: [(f64, f64, f64); 13] = {
    const A1: f64 = 0.260_345_966_079_038;
    const B1: f64 = 1.0 - 2.0 * A1;
    const A2: f64 = 0.065_130_102_902_216;
    const B2: f64 = 1.0 - 2.0 * A2;
    const C: f64 = 0.638_444_188_569_809;
    const D: f64 = 0.048_690_315_425_316;
    const E: f64 = 1.0 - C - D;
    [
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        (A1, A1, B1),
        (A1, B1, A1),
        (B1, A1, A1),
        (A2, A2, B2),
        (A2, B2, A2),
        (B2, A2, A2),
        (C, D, E),
        (C, E, D),
        (D, C, E),
        (D, E, C),
        (E, C, D),
        (E, D, C),
    ]
};
const TRI13_W: [f64; 13] = {
    const W0: f64 = -0.149_570_044_467_670;
    const W1: f64 = 0.175_615_257_433_204;
    const W2: f64 = 0.053_347_235_608_839;
    const W3: f64 = 0.077_113_760_890_257;
    [W0, W1, W1, W1, W2, W2, W2, W3, W3, W3, W3, W3, W3]
};

/// 2x2 Gauss-Legendre rule for an uncut element.
pub fn standard_rule(mesh: &Mesh, e: usize) -> QuadratureSet {
    let mut points = Vec::with_capacity(4);
    for &xi in &[-GP, GP] {
        for &eta in &[-GP, GP] {
            let x = mesh.parent_to_physical(e, xi, eta);
            let det = mesh.jacobian(e, xi, eta).determinant();
            points.push(QuadPoint {
                xi,
                eta,
                x,
                w: det,
            });
        }
    }
    QuadratureSet {
        elem: e,
        scheme: SchemeTag::Standard,
        points,
    }
}

/// 6-point Gauss-Legendre nodes and weights on [-1, 1].
const GAUSS6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152_1, 0.171_324_492_379_170_36),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691_04),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691_04),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152_1, 0.171_324_492_379_170_36),
];

/// 6x6 Gauss-Legendre rule for an uncut element; used where an integrand is
/// smooth but strongly varying (e.g. near-tip auxiliary fields in the
/// interaction integral).
pub fn dense_standard_rule(mesh: &Mesh, e: usize) -> QuadratureSet {
    let mut points = Vec::with_capacity(36);
    for &(xi, wx) in &GAUSS6 {
        for &(eta, wy) in &GAUSS6 {
            let x = mesh.parent_to_physical(e, xi, eta);
            let det = mesh.jacobian(e, xi, eta).determinant();
            points.push(QuadPoint {
                xi,
                eta,
                x,
                w: det * wx * wy,
            });
        }
    }
    QuadratureSet {
        elem: e,
        scheme: SchemeTag::Standard,
        points,
    }
}

/// Triangulates a sub-polygon: fan from the first vertex, falling back to
/// ear clipping when the fan produces an inverted triangle (non-convex
/// sub-polygon seen from vertex 0).
fn triangulate(poly: &Polygon) -> Vec<[Vec2; 3]> {
    let v = poly.vertices();
    let n = v.len();
    let mut tris = Vec::with_capacity(n - 2);
    let mut ok = true;
    for i in 1..n - 1 {
        let t = [v[0], v[i], v[i + 1]];
        if signed_area(&t) <= 0.0 {
            ok = false;
            break;
        }
        tris.push(t);
    }
    if ok {
        return tris;
    }
    ear_clip(v)
}

fn ear_clip(verts: &[Vec2]) -> Vec<[Vec2; 3]> {
    let mut idx: Vec<usize> = (0..verts.len()).collect();
    let mut tris = Vec::with_capacity(verts.len() - 2);
    'outer: while idx.len() > 3 {
        let m = idx.len();
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, cv) = (verts[ia], verts[ib], verts[ic]);
            if cross(b - a, cv - b) <= 0.0 {
                continue; // reflex corner, not an ear
            }
            let contains_other = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                point_in_triangle(verts[j], a, b, cv)
            });
            if !contains_other {
                tris.push([a, b, cv]);
                idx.remove(i);
                continue 'outer;
            }
        }
        // No ear found (degenerate slivers); emit the remaining fan.
        break;
    }
    if idx.len() >= 3 {
        for i in 1..idx.len() - 1 {
            tris.push([verts[idx[0]], verts[idx[i]], verts[idx[i + 1]]]);
        }
    }
    tris
}

fn point_in_triangle(p: Vec2, a: Vec2, b: Vec2, c: Vec2) -> bool {
    let d1 = cross(b - a, p - a);
    let d2 = cross(c - b, p - b);
    let d3 = cross(a - c, p - c);
    d1 > 0.0 && d2 > 0.0 && d3 > 0.0
}

/// Baseline cut-element rule: 13 points per subcell triangle.
pub fn subcell_rule(mesh: &Mesh, e: usize, sub_polys: &[Polygon]) -> Result<QuadratureSet> {
    let mut points = Vec::new();
    for poly in sub_polys {
        for tri in triangulate(poly) {
            let area = signed_area(&tri);
            for (&(l1, l2, l3), &w) in TRI13.iter().zip(&TRI13_W) {
                let x = tri[0] * l1 + tri[1] * l2 + tri[2] * l3;
                let (xi, eta) = mesh.physical_to_parent(e, x)?;
                points.push(QuadPoint {
                    xi,
                    eta,
                    x,
                    w: w * area,
                });
            }
        }
    }
    Ok(QuadratureSet {
        elem: e,
        scheme: SchemeTag::Subcell,
        points,
    })
}

/// Chooses (n_r, n_t) disk-rule dimensions for each sub-polygon so the total
/// point count lands within about 20% of `target`, split across sub-polygons
/// in proportion to their areas.
pub fn tip_point_budget(target: usize, sub_polys: &[Polygon]) -> Vec<(usize, usize)> {
    let target = target.max(4);
    let total_area: f64 = sub_polys.iter().map(|p| p.area()).sum();
    sub_polys
        .iter()
        .map(|p| {
            let share = if total_area > 0.0 {
                p.area() / total_area
            } else {
                1.0 / sub_polys.len() as f64
            };
            budget_dims((target as f64 * share).round().max(1.0) as usize)
        })
        .collect()
}

/// (n_r, n_t) with n_r n_t >= budget, n_r ~ sqrt(budget/2).
fn budget_dims(budget: usize) -> (usize, usize) {
    let b = budget.max(2);
    let n_r = ((b as f64 / 2.0).sqrt().round() as usize).max(1);
    let n_t = ((b + n_r - 1) / n_r).max(2);
    (n_r, n_t)
}

/// Default per-sub-polygon budget matching the subcell baseline's point
/// count: 13 per fan triangle.
pub fn parity_budget(sub_polys: &[Polygon]) -> Vec<(usize, usize)> {
    sub_polys
        .iter()
        .map(|p| budget_dims(13 * (p.len() - 2)))
        .collect()
}

/// Subcell-free cut-element rule: one transplanted disk rule per
/// sub-polygon. Weights from the map derivative are physical areas already,
/// so no Jacobian factor is applied. Falls back to the subcell baseline for
/// this element if the SC solver fails (crowding or non-convergence).
pub fn sccm_rule(
    mesh: &Mesh,
    e: usize,
    sub_polys: &[Polygon],
    kind: DiskRuleKind,
    budgets: &[(usize, usize)],
) -> Result<QuadratureSet> {
    debug_assert_eq!(sub_polys.len(), budgets.len());
    let mut points = Vec::new();
    for (poly, &(n_r, n_t)) in sub_polys.iter().zip(budgets) {
        let map = match ConformalMap::solve(poly, 1e-10) {
            Ok(m) => m,
            Err(err) => {
                log::warn!("element {e}: SC solve failed ({err}); subcell fallback");
                return subcell_rule(mesh, e, sub_polys);
            }
        };
        let rule = DiskRule::build(kind, n_r, n_t);
        for (x, w) in map_quadrature(&map, &rule)? {
            let (xi, eta) = mesh.physical_to_parent(e, x)?;
            points.push(QuadPoint { xi, eta, x, w });
        }
    }
    Ok(QuadratureSet {
        elem: e,
        scheme: SchemeTag::Sccm,
        points,
    })
}

/// Dispatch for one element given its cut classification.
pub fn element_rule(
    mesh: &Mesh,
    e: usize,
    cut: &ElementCut,
    scheme: Scheme,
    tip_budget: Option<usize>,
) -> Result<QuadratureSet> {
    match cut.class {
        CutClass::Uncut => Ok(standard_rule(mesh, e)),
        _ => match scheme {
            Scheme::Subcell => subcell_rule(mesh, e, &cut.polys),
            Scheme::Sccm(kind) => {
                let budgets = match (cut.class, tip_budget) {
                    (CutClass::Tip, Some(t)) => tip_point_budget(t, &cut.polys),
                    _ => parity_budget(&cut.polys),
                };
                sccm_rule(mesh, e, &cut.polys, kind, &budgets)
            }
        },
    }
}

/// Per-element point dump (elem,x,y,w,scheme) for scatter-plot reproduction.
pub fn dump_quadrature<W: Write>(out: &mut W, sets: &[QuadratureSet]) -> Result<()> {
    writeln!(out, "elem,x,y,w,scheme")?;
    for set in sets {
        let tag = match set.scheme {
            SchemeTag::Standard => "standard",
            SchemeTag::Subcell => "subcell",
            SchemeTag::Sccm => "sccm",
        };
        for p in &set.points {
            writeln!(out, "{},{},{},{},{}", set.elem, p.x.x, p.x.y, p.w, tag)?;
        }
    }
    Ok(())
}

/// Exact integral of x^p y^q over a polygon by Green's theorem, with the
/// boundary integral evaluated by Gauss-Legendre exact through degree 15.
/// Used as an oracle throughout the test suites.
pub fn polygon_monomial_integral(poly: &Polygon, p: u32, q: u32) -> f64 {
    let gl = crate::sccm::gauss_legendre(8);
    let v = poly.vertices();
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // int x^p y^q dA = oint x^(p+1)/(p+1) y^q dy
        let dy = b.y - a.y;
        if dy == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
            let pt = a + (b - a) * (0.5 * (t + 1.0));
            s += w * pt.x.powi(p as i32 + 1) * pt.y.powi(q as i32);
        }
        total += 0.5 * dy * s / (p as f64 + 1.0);
    }
    total
}
