//! Pure-text SVG rendering of sweep CSVs: E(t) against t, one polyline per
//! direction block, with a dashed reference line at E(0).

use crate::scenario::{CliError, CliResult};
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 25.0;
const MARGIN_B: f64 = 45.0;

/// Parses the sweep CSV into per-direction blocks of (t, E) points. Blocks
/// are delimited by the t column resetting.
fn parse_sweep_csv(text: &str) -> CliResult<Vec<Vec<(f64, f64)>>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("empty CSV".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"t") || columns.get(1) != Some(&"E") {
        return Err(CliError::Config(format!(
            "unexpected CSV header '{header}' (expected a sweep CSV starting with t,E,...)"
        )));
    }
    let mut blocks: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut prev_t = f64::INFINITY;
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(CliError::Config(format!(
                "line {}: expected at least 2 columns",
                lineno + 2
            )));
        }
        let t: f64 = fields[0]
            .parse()
            .map_err(|e| CliError::Config(format!("line {}: bad t: {e}", lineno + 2)))?;
        let e: f64 = fields[1]
            .parse()
            .map_err(|e| CliError::Config(format!("line {}: bad E: {e}", lineno + 2)))?;
        if t <= prev_t || blocks.is_empty() {
            blocks.push(Vec::new());
        }
        blocks.last_mut().unwrap().push((t, e));
        prev_t = t;
    }
    if blocks.is_empty() || blocks.iter().all(|b| b.is_empty()) {
        return Err(CliError::Config("CSV has no data rows".into()));
    }
    Ok(blocks)
}

/// Renders the sweep CSV text into an SVG document.
pub fn render_sweep_svg(csv_text: &str) -> CliResult<String> {
    let blocks = parse_sweep_csv(csv_text)?;
    let reference = blocks[0][0].1; // E at the first grid point (t = 0)

    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let mut e_min = reference;
    let mut e_max = reference;
    for block in &blocks {
        for &(t, e) in block {
            t_min = t_min.min(t);
            t_max = t_max.max(t);
            e_min = e_min.min(e);
            e_max = e_max.max(e);
        }
    }
    if t_max <= t_min {
        t_max = t_min + 1.0;
    }
    let pad = ((e_max - e_min).abs()).max(1e-9 * (1.0 + reference.abs())) * 0.08;
    e_min -= pad;
    e_max += pad;

    let x = |t: f64| MARGIN_L + (t - t_min) / (t_max - t_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let y =
        |e: f64| HEIGHT - MARGIN_B - (e - e_min) / (e_max - e_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    );

    // ticks
    for k in 0..=4 {
        let t = t_min + (t_max - t_min) * k as f64 / 4.0;
        let e = e_min + (e_max - e_min) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" font-size="12" text-anchor="middle">{4:.2}</text>"#,
            x(t),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0,
            HEIGHT - MARGIN_B + 20.0,
            t
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="black"/><text x="{3}" y="{4}" font-size="12" text-anchor="end">{5:.6}</text>"#,
            y(e),
            MARGIN_L - 5.0,
            MARGIN_L,
            MARGIN_L - 8.0,
            y(e) + 4.0,
            e
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">t</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {})">E(t)</text>"#,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    );

    // reference line at E(0)
    let _ = writeln!(
        svg,
        r##"<line x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="#c02020" stroke-width="1" stroke-dasharray="6,4"/>"##,
        MARGIN_L,
        WIDTH - MARGIN_R,
        y(reference)
    );

    // one polyline per direction block
    for (k, block) in blocks.iter().enumerate() {
        let mut points = String::new();
        for &(t, e) in block {
            let _ = write!(points, "{:.2},{:.2} ", x(t), y(e));
        }
        let hue = (k * 47) % 360;
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="hsl({hue},65%,40%)" stroke-width="1.5"/>"#,
            points.trim_end()
        );
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_two_blocks() {
        let csv = "t,E,dE_fd,lemma2_statement,lemma2_proof,Phi,Chi,minB,minStressEig,verdict\n\
                   0.0,10.0,0,0,0,0,0,0,0,PASS\n\
                   1.0,9.0,0,0,0,0,0,0,0,PASS\n\
                   0.0,10.0,0,0,0,0,0,0,0,PASS\n\
                   1.0,8.5,0,0,0,0,0,0,0,PASS\n";
        let svg = render_sweep_svg(csv).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn empty_csv_is_config_error() {
        assert!(matches!(render_sweep_svg(""), Err(CliError::Config(_))));
        let header_only =
            "t,E,dE_fd,lemma2_statement,lemma2_proof,Phi,Chi,minB,minStressEig,verdict\n";
        assert!(matches!(
            render_sweep_svg(header_only),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn flat_sweep_renders_without_degenerate_range() {
        let csv = "t,E,dE_fd,lemma2_statement,lemma2_proof,Phi,Chi,minB,minStressEig,verdict\n\
                   0.0,12.566370614359172,0,0,0,0,0,0,0,PASS\n\
                   2.0,12.566370614359172,0,0,0,0,0,0,0,PASS\n";
        let svg = render_sweep_svg(csv).unwrap();
        assert!(svg.contains("<polyline"));
    }
}
