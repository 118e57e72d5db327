//! Convergence-rate extraction and CSV/SVG output.

use std::io::Write;
use std::path::Path;
use xfrac_core::{Error, Result, Vec2};

/// One line of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    /// Element size (or sweep parameter for non-mesh sweeps).
    pub h: f64,
    pub metric: f64,
    pub reference: f64,
    pub rel_err: f64,
    /// Log-log slope against the previous row; undefined on the first row.
    pub rate: Option<f64>,
}

impl ConvergenceRow {
    pub fn new(h: f64, metric: f64, reference: f64) -> ConvergenceRow {
        let rel_err = if reference != 0.0 {
            ((metric - reference) / reference).abs()
        } else {
            (metric - reference).abs()
        };
        ConvergenceRow {
            h,
            metric,
            reference,
            rel_err,
            rate: None,
        }
    }
}

/// Fills per-row consecutive rates and returns the least-squares slope of
/// log(rel_err) vs log(h) over all rows.
pub fn convergence_driver(rows: &mut [ConvergenceRow]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::Domain(
            "convergence rate needs at least 2 rows".into(),
        ));
    }
    for i in 1..rows.len() {
        let (e0, e1) = (rows[i - 1].rel_err, rows[i].rel_err);
        let (h0, h1) = (rows[i - 1].h, rows[i].h);
        rows[i].rate = Some((e1 / e0).ln() / (h1 / h0).ln());
    }
    let n = rows.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for r in rows.iter() {
        if r.rel_err <= 0.0 || r.h <= 0.0 {
            return Err(Error::Domain("nonpositive h or error in rate fit".into()));
        }
        let (x, y) = (r.h.ln(), r.rel_err.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// CSV with columns exactly `h,metric,reference,rel_err,rate`.
pub fn write_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "h,metric,reference,rel_err,rate")?;
    for r in rows {
        let rate = r.rate.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.h, r.metric, r.reference, r.rel_err, rate
        )?;
    }
    Ok(())
}

/// Minimal SVG line art: domain outline, polylines (crack paths), and tip
/// markers.
pub fn write_svg(
    path: &Path,
    lo: Vec2,
    hi: Vec2,
    polylines: &[(Vec<Vec2>, &str)],
    tips: &[Vec2],
) -> Result<()> {
    let w = hi.x - lo.x;
    let h = hi.y - lo.y;
    let scale = 600.0 / w.max(h);
    let (pw, ph) = (w * scale, h * scale);
    // SVG y axis points down; flip about the domain midline.
    let tx = |p: Vec2| (p.x - lo.x) * scale;
    let ty = |p: Vec2| (hi.y - p.y) * scale;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {pw} {ph}\">"
    )?;
    writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>"
    )?;
    for (pts, color) in polylines {
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", tx(*p), ty(*p))).collect();
        writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            coords.join(" "),
            color
        )?;
    }
    for t in tips {
        writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"red\"/>",
            tx(*t),
            ty(*t)
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(rate: f64) -> Vec<ConvergenceRow> {
        [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&h| {
                let err = 3.0 * f64::powf(h, rate);
                ConvergenceRow::new(h, 1.0 + err, 1.0)
            })
            .collect()
    }

    #[test]
    fn recovers_synthetic_rates() {
        for want in [0.4, 1.34] {
            let mut rows = synthetic(want);
            let rate = convergence_driver(&mut rows).unwrap();
            assert!((rate - want).abs() < 1e-6, "{rate} vs {want}");
            for r in &rows[1..] {
                assert!((r.rate.unwrap() - want).abs() < 1e-6);
            }
            assert!(rows[0].rate.is_none());
        }
    }

    #[test]
    fn single_row_is_an_error() {
        let mut rows = synthetic(0.4);
        rows.truncate(1);
        assert!(convergence_driver(&mut rows).is_err());
    }

    #[test]
    fn csv_layout() {
        let dir = std::env::temp_dir().join("xfrac_report_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rows.csv");
        let mut rows = synthetic(0.4);
        convergence_driver(&mut rows).unwrap();
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "h,metric,reference,rel_err,rate");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 5);
        assert_eq!(first[4], "");
        // Determinism: a second write is byte-identical.
        let path2 = dir.join("rows2.csv");
        write_csv(&path2, &rows).unwrap();
        assert_eq!(text, std::fs::read_to_string(&path2).unwrap());
    }

    #[test]
    fn svg_contains_expected_elements() {
        let dir = std::env::temp_dir().join("xfrac_report_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("path.svg");
        write_svg(
            &path,
            Vec2::new(0.0, 0.0),
            Vec2::new(6.0, 2.0),
            &[(vec![Vec2::new(0.0, 1.0), Vec2::new(2.0, 1.1)], "blue")],
            &[Vec2::new(2.0, 1.1)],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("<polyline"));
        assert!(text.contains("<circle"));
        assert!(text.contains("<rect"));
    }
}
