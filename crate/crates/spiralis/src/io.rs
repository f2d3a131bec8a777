//! Artifact emission: atomic file writes, CSV tables, and a minimal
//! line-plot SVG.
//!
//! Output discipline: files are written to a temporary sibling and renamed
//! into place, so a failed run never leaves a partial artifact. CSV is
//! comma-separated UTF-8 with a header row and LF line endings; floats carry
//! 12 significant digits. The SVG emitter is a pure function of its input,
//! so identical runs produce byte-identical plots.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::groups::OrbitElement;
use crate::lab::ExperimentReport;
use crate::thermo::ExponentFit;
use crate::{Error, Result};

/// Distinguishes temp files of concurrent writers in the same directory.
static WRITE_COUNTER: AtomicU64 = AtomicU64::new(0);

/// A float with 12 significant digits, in scientific notation so the width
/// never depends on magnitude.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write `bytes` to `path` atomically: the data lands in a temporary file in
/// the target directory first and is renamed over `path` only once fully
/// written, so readers never observe a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a writable path: {}", path.display())))?;
    let tmp_name = format!(
        ".{}.tmp-{}-{}",
        file_name.to_string_lossy(),
        std::process::id(),
        WRITE_COUNTER.fetch_add(1, Ordering::Relaxed)
    );
    let tmp_path = match dir {
        Some(d) => d.join(&tmp_name),
        None => Path::new(&tmp_name).to_path_buf(),
    };
    let result = (|| -> Result<()> {
        let mut file = std::fs::File::create(&tmp_path)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        std::fs::rename(&tmp_path, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp_path);
    }
    result
}

/// An in-memory CSV table; serialize with [`CsvTable::to_bytes`].
#[derive(Clone, Debug)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> CsvTable {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; its width must match the header.
    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Header plus rows, comma-separated, one LF per line.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, &self.to_bytes())
    }
}

/// Orbit elements as CSV: exact integer entries for the matrix groups,
/// coordinates for the quaternion groups, one row per element.
pub fn orbit_csv(elements: &[OrbitElement]) -> Result<CsvTable> {
    let integer_backed = elements.iter().all(|el| el.exact.is_some());
    let coordinate_backed = elements.iter().all(|el| el.coords.is_some());
    if integer_backed {
        let mut table = CsvTable::new(&["a", "b", "c", "d", "displacement"]);
        for el in elements {
            let m = el.exact.as_ref().expect("checked integer-backed");
            table.push_row(vec![
                m.a.to_string(),
                m.b.to_string(),
                m.c.to_string(),
                m.d.to_string(),
                format_float(el.displacement),
            ]);
        }
        Ok(table)
    } else if coordinate_backed {
        let mut table = CsvTable::new(&["x", "y", "z", "t", "displacement"]);
        for el in elements {
            let [x, y, z, t] = el.coords.expect("checked coordinate-backed");
            table.push_row(vec![
                x.to_string(),
                y.to_string(),
                z.to_string(),
                t.to_string(),
                format_float(el.displacement),
            ]);
        }
        Ok(table)
    } else {
        Err(Error::InvalidConfig(
            "orbit mixes exact and coordinate-backed elements".into(),
        ))
    }
}

/// Shell diagnostics of an exponent fit as CSV (`t,count,log_sum`), skipping
/// empty shells whose log sum is −∞.
pub fn shells_csv(fit: &ExponentFit) -> CsvTable {
    let mut table = CsvTable::new(&["t", "count", "log_sum"]);
    for shell in &fit.shells {
        if shell.count == 0 {
            continue;
        }
        table.push_row(vec![
            format_float(shell.t),
            shell.count.to_string(),
            format_float(shell.log_sum),
        ]);
    }
    table
}

/// Per-sample traces of an experiment report as CSV: one row per sample,
/// one column per grid point.
pub fn traces_csv(report: &ExperimentReport) -> CsvTable {
    let grid_headers: Vec<String> =
        report.grid.iter().map(|g| format!("at_{}", format_float(*g))).collect();
    let mut header: Vec<&str> = vec!["index"];
    header.extend(grid_headers.iter().map(|s| s.as_str()));
    let mut table = CsvTable::new(&header);
    for trace in &report.per_sample {
        let mut row = vec![trace.index.to_string()];
        row.extend(trace.values.iter().map(|v| format_float(*v)));
        table.push_row(row);
    }
    table
}

/// Viewport size of emitted plots.
const PLOT_WIDTH: f64 = 640.0;
const PLOT_HEIGHT: f64 = 400.0;
const PLOT_MARGIN: f64 = 50.0;

/// Fixed-precision coordinate for SVG attributes: two decimals are below
/// visual resolution and keep the output byte-stable.
fn svg_coord(x: f64) -> String {
    format!("{x:.2}")
}

/// Render `series` as a minimal line plot with axes and a caption. The
/// output depends only on the arguments, byte for byte.
pub fn emit_plot(series: &[(f64, f64)], caption: &str) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if series.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidConfig("plot series must be finite".into()));
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    // Degenerate spans (single point, constant series) get a unit window.
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = PLOT_MARGIN + (x - x0) / (x1 - x0) * (PLOT_WIDTH - 2.0 * PLOT_MARGIN);
        let py = PLOT_HEIGHT - PLOT_MARGIN
            - (y - y0) / (y1 - y0) * (PLOT_HEIGHT - 2.0 * PLOT_MARGIN);
        (px, py)
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">",
        svg_coord(PLOT_WIDTH),
        svg_coord(PLOT_HEIGHT)
    );
    let _ = writeln!(svg, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    // Axes along the left and bottom edges of the data window.
    let (ax0, ay0) = to_px(x0, y0);
    let (ax1, _) = to_px(x1, y0);
    let (_, ay1) = to_px(x0, y1);
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        svg_coord(ax0),
        svg_coord(ay0),
        svg_coord(ax1),
        svg_coord(ay0)
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        svg_coord(ax0),
        svg_coord(ay0),
        svg_coord(ax0),
        svg_coord(ay1)
    );
    // Axis range labels.
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
        svg_coord(ax0),
        svg_coord(ay0 + 16.0),
        format_float(x0)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
        svg_coord(ax1),
        svg_coord(ay0 + 16.0),
        format_float(x1)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
        svg_coord(ax0 - 44.0),
        svg_coord(ay0),
        format_float(y0)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
        svg_coord(ax0 - 44.0),
        svg_coord(ay1),
        format_float(y1)
    );
    if series.len() > 1 {
        let points: Vec<String> = series
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{},{}", svg_coord(px), svg_coord(py))
            })
            .collect();
        let _ = writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>",
            points.join(" ")
        );
    }
    for &(x, y) in series {
        let (px, py) = to_px(x, y);
        let _ = writeln!(
            svg,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"steelblue\"/>",
            svg_coord(px),
            svg_coord(py)
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        svg_coord(PLOT_WIDTH / 2.0),
        svg_coord(PLOT_MARGIN / 2.0),
        xml_escape(caption)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{enumerate_ball, enumerate_quaternion, EnumerationBudget, GroupSpec};
    use crate::thermo::{critical_exponent, Potential, WeightedOrbit};

    #[test]
    fn atomic_write_replaces_the_target_and_leaves_no_temp_files() {
        let dir = std::env::temp_dir().join(format!("spiralis-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        atomic_write(&path, b"first\n").unwrap();
        atomic_write(&path, b"second\n").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second\n");
        let leftovers: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
            .collect();
        assert!(leftovers.is_empty(), "temp files left behind: {leftovers:?}");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn atomic_write_into_a_missing_directory_fails_without_partial_output() {
        let dir = std::env::temp_dir().join(format!("spiralis-io-missing-{}", std::process::id()));
        let path = dir.join("out.csv");
        assert!(atomic_write(&path, b"data").is_err());
        assert!(!path.exists());
    }

    #[test]
    fn csv_tables_have_headers_lf_endings_and_sig12_floats() {
        let mut table = CsvTable::new(&["t", "value"]);
        table.push_row(vec![format_float(1.0), format_float(0.1)]);
        table.push_row(vec![format_float(2.0), format_float(12345.678901234)]);
        let text = String::from_utf8(table.to_bytes()).unwrap();
        assert_eq!(
            text,
            "t,value\n1.00000000000e0,1.00000000000e-1\n2.00000000000e0,1.23456789012e4\n"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn orbit_csv_uses_integer_entries_for_matrix_groups() {
        let elements =
            enumerate_ball(&GroupSpec::psl2z(), 2.0, &EnumerationBudget::default()).unwrap();
        let table = orbit_csv(&elements).unwrap();
        let text = String::from_utf8(table.to_bytes()).unwrap();
        assert!(text.starts_with("a,b,c,d,displacement\n"));
        assert_eq!(table.row_count(), elements.len());
        // The identity row is exact integers and a zero displacement.
        assert!(text.contains("1,0,0,1,0.00000000000e0"));
    }

    #[test]
    fn orbit_csv_uses_coordinates_for_quaternion_groups() {
        let elements = enumerate_quaternion(2, 3, 3, &EnumerationBudget::default()).unwrap();
        let table = orbit_csv(&elements).unwrap();
        let text = String::from_utf8(table.to_bytes()).unwrap();
        assert!(text.starts_with("x,y,z,t,displacement\n"));
        assert!(text.contains("1,0,0,0,0.00000000000e0"));
    }

    #[test]
    fn shell_csv_rows_match_the_nonempty_shells() {
        let orbit = WeightedOrbit::from_ball(
            &GroupSpec::psl2z(),
            6.0,
            &Potential::zero(),
            &EnumerationBudget::default(),
        )
        .unwrap();
        let fit = critical_exponent(&orbit, (2.0, 6.0), 1.0).unwrap();
        let table = shells_csv(&fit);
        assert_eq!(
            table.row_count(),
            fit.shells.iter().filter(|s| s.count > 0).count()
        );
    }

    #[test]
    fn traces_csv_lists_one_row_per_sample() {
        let mut report = ExperimentReport::new("loglaw");
        report.grid = vec![4.0, 8.0];
        report.per_sample.push(crate::lab::SampleTrace {
            index: 0,
            values: vec![0.5, 1.5],
        });
        report.per_sample.push(crate::lab::SampleTrace {
            index: 1,
            values: vec![0.25, 0.75],
        });
        let text = String::from_utf8(traces_csv(&report).to_bytes()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "index,at_4.00000000000e0,at_8.00000000000e0"
        );
        assert_eq!(lines.next().unwrap(), "0,5.00000000000e-1,1.50000000000e0");
        assert_eq!(lines.next().unwrap(), "1,2.50000000000e-1,7.50000000000e-1");
    }

    #[test]
    fn empty_series_cannot_be_plotted() {
        assert!(matches!(emit_plot(&[], "caption"), Err(Error::EmptySeries)));
    }

    #[test]
    fn single_point_series_yields_one_marker_and_no_polyline() {
        let svg = emit_plot(&[(1.0, 2.0)], "single").unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("<polyline"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn identical_series_render_byte_identical_plots() {
        let series = [(1.0, 0.5), (2.0, 1.5), (3.0, 1.0)];
        let a = emit_plot(&series, "repeat").unwrap();
        let b = emit_plot(&series, "repeat").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.contains("<polyline"));
    }

    #[test]
    fn increasing_series_slopes_downward_in_pixel_space() {
        // SVG y grows downward, so an increasing series must have strictly
        // decreasing marker y-coordinates.
        let svg = emit_plot(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)], "up").unwrap();
        let ys: Vec<f64> = svg
            .lines()
            .filter(|l| l.contains("<circle"))
            .map(|l| {
                let tail = l.split("cy=\"").nth(1).unwrap();
                tail.split('"').next().unwrap().parse::<f64>().unwrap()
            })
            .collect();
        assert_eq!(ys.len(), 3);
        assert!(ys[0] > ys[1] && ys[1] > ys[2], "marker ys not decreasing: {ys:?}");
    }

    #[test]
    fn captions_are_xml_escaped() {
        let svg = emit_plot(&[(0.0, 0.0)], "a < b & c > d").unwrap();
        assert!(svg.contains("a &lt; b &amp; c &gt; d"));
    }
}
