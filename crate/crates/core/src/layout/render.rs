use std::fmt::Write;
use std::str::FromStr;

use crate::icm::OpKind;
use crate::layout::schedule::{metrics, PlacementTag, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Ascii,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svg" => Ok(RenderFormat::Svg),
            "ascii" => Ok(RenderFormat::Ascii),
            other => Err(format!("unknown render format `{other}`")),
        }
    }
}

pub fn render(s: &Schedule, format: RenderFormat) -> Vec<u8> {
    match format {
        RenderFormat::Svg => render_svg(s).into_bytes(),
        RenderFormat::Ascii => render_ascii(s).into_bytes(),
    }
}

fn fill(tag: PlacementTag, kind: OpKind) -> &'static str {
    match tag {
        PlacementTag::DistillTrialSuccess => "#3c9a3c",
        PlacementTag::DistillTrialFail => "#c83232",
        PlacementTag::PooledHold => "#a6d96a",
        PlacementTag::CircuitOp => match kind {
            OpKind::Cnot => "#4a6fa5",
            OpKind::Measure => "#8c8c8c",
            _ => "#b0b0b0",
        },
    }
}

fn class(tag: PlacementTag) -> &'static str {
    match tag {
        PlacementTag::CircuitOp => "op",
        PlacementTag::DistillTrialSuccess => "success",
        PlacementTag::DistillTrialFail => "fail",
        PlacementTag::PooledHold => "pooled",
    }
}

/// Time runs left to right, wires top to bottom, one user unit per cell.
pub fn render_svg(s: &Schedule) -> String {
    let m = metrics(s);
    let (t, w) = (m.t.max(1), m.s.max(1));
    // Aim for roughly 1200px on the longer axis without magnifying tiny schedules past 24px/cell.
    let scale = (1200.0 / t.max(w) as f64).min(24.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {t} {w}" width="{:.0}" height="{:.0}" preserveAspectRatio="none">"#,
        t as f64 * scale,
        w as f64 * scale,
    );
    let _ = writeln!(out, "<title>T={} S={} BB={}</title>", m.t, m.s, m.bb);
    let _ = writeln!(out, r##"<rect class="canvas" x="0" y="0" width="{t}" height="{w}" fill="#ffffff"/>"##);
    for p in &s.placements {
        let _ = writeln!(
            out,
            r##"<rect class="box {}" data-id="{}" data-kind="{}" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#202020" stroke-width="{:.4}"/>"##,
            class(p.tag),
            p.id,
            p.kind,
            p.t_start,
            p.w_lo,
            p.duration(),
            p.width(),
            fill(p.tag, p.kind),
            1.0 / scale,
        );
    }
    out.push_str("</svg>\n");
    out
}

fn glyph(tag: PlacementTag) -> char {
    match tag {
        PlacementTag::CircuitOp => '#',
        PlacementTag::DistillTrialSuccess => 'S',
        PlacementTag::DistillTrialFail => 'x',
        PlacementTag::PooledHold => '-',
    }
}

/// One character per (time, wire) cell; rows are wires.
pub fn render_ascii(s: &Schedule) -> String {
    let m = metrics(s);
    let mut grid = vec![vec!['.'; m.t as usize]; m.s as usize];
    for p in &s.placements {
        for row in &mut grid[p.w_lo as usize..p.w_hi as usize] {
            for cell in &mut row[p.t_start as usize..p.t_end as usize] {
                *cell = glyph(p.tag);
            }
        }
    }
    let mut out = format!("# T={} S={} BB={}\n", m.t, m.s, m.bb);
    for row in grid {
        out.extend(row);
        out.push('\n');
    }
    out
}
