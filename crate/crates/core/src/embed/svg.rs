use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{MapLayout, Marker, Style};
use crate::error::Result;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;
const LEGEND_WIDTH: f64 = 200.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn default_style() -> Style {
    Style {
        color: "#1f77b4".to_string(),
        marker: Marker::Dot,
        group: String::new(),
    }
}

/// The map as an SVG document.
pub fn svg_document(layout: &MapLayout) -> String {
    let fallback = default_style();
    let style = |id: &str| layout.styling.get(id).unwrap_or(&fallback);

    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &layout.points {
        lo_x = lo_x.min(p.x);
        hi_x = hi_x.max(p.x);
        lo_y = lo_y.min(p.y);
        hi_y = hi_y.max(p.y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let inner = SIZE - 2.0 * MARGIN;
    let screen = |x: f64, y: f64| {
        if layout.points.is_empty() {
            return (SIZE / 2.0, SIZE / 2.0);
        }
        (
            MARGIN + (x - lo_x) / span * inner,
            MARGIN + (hi_y - y) / span * inner,
        )
    };

    let mut out = String::new();
    writeln!(
        out,
        r##"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##,
        w = SIZE + LEGEND_WIDTH,
        h = SIZE
    )
    .unwrap();

    let corner_position = |label: &str| {
        layout
            .points
            .iter()
            .find(|p| style(&p.id).marker == Marker::Corner && style(&p.id).group == label)
            .map(|p| screen(p.x, p.y))
    };
    let mut paths: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut path_colors: BTreeMap<&str, &str> = BTreeMap::new();
    for p in &layout.points {
        let s = style(&p.id);
        if s.marker == Marker::PathPoint {
            paths.entry(&s.group).or_default().push(screen(p.x, p.y));
            path_colors.insert(&s.group, &s.color);
        }
    }
    out.push_str("<g id=\"paths\" fill=\"none\" stroke-width=\"1\">\n");
    for (group, pts) in &paths {
        let mut line = Vec::new();
        let ends = group.split_once('-');
        if let Some(start) = ends.and_then(|(_, to)| corner_position(to)) {
            line.push(start);
        }
        line.extend(pts.iter().copied());
        if let Some(end) = ends.and_then(|(from, _)| corner_position(from)) {
            line.push(end);
        }
        let coords: Vec<String> = line.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(
            out,
            r##"<polyline class="path" data-group="{}" stroke="{}" points="{}"/>"##,
            escape(group),
            escape(path_colors[group]),
            coords.join(" ")
        )
        .unwrap();
    }
    out.push_str("</g>\n<g id=\"points\">\n");

    let mut drawn: Vec<&MarkerEntry> = Vec::new();
    let entries: Vec<MarkerEntry> = layout
        .points
        .iter()
        .map(|p| {
            let s = style(&p.id);
            let (x, y) = screen(p.x, p.y);
            MarkerEntry {
                id: &p.id,
                x,
                y,
                style: s,
            }
        })
        .collect();
    // corners last so they sit on top
    for e in entries.iter().filter(|e| e.style.marker != Marker::Corner) {
        drawn.push(e);
    }
    for e in entries.iter().filter(|e| e.style.marker == Marker::Corner) {
        drawn.push(e);
    }
    for e in drawn {
        let id = escape(e.id);
        let color = escape(&e.style.color);
        match e.style.marker {
            Marker::Corner => {
                writeln!(
                    out,
                    r##"<rect class="corner" data-id="{id}" x="{:.2}" y="{:.2}" width="14" height="14" fill="{color}" stroke="#ffffff" stroke-width="2"/>
<text class="corner-label" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="18" font-weight="bold">{id}</text>"##,
                    e.x - 7.0,
                    e.y - 7.0,
                    e.x + 10.0,
                    e.y - 10.0
                )
                .unwrap();
            }
            Marker::PathPoint => {
                writeln!(
                    out,
                    r##"<circle class="path-point" data-id="{id}" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"##,
                    e.x, e.y
                )
                .unwrap();
            }
            Marker::Dot => {
                writeln!(
                    out,
                    r##"<circle class="point" data-id="{id}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}" fill-opacity="0.8"/>"##,
                    e.x, e.y
                )
                .unwrap();
            }
        }
    }
    out.push_str("</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n");

    let mut legend: Vec<(&str, &str, Marker)> = Vec::new();
    for p in &layout.points {
        let s = style(&p.id);
        if s.marker != Marker::Corner && !legend.iter().any(|(g, _, _)| *g == s.group) {
            legend.push((&s.group, &s.color, s.marker));
        }
    }
    for (k, (group, color, marker)) in legend.iter().enumerate() {
        let y = MARGIN + 24.0 * k as f64;
        let x = SIZE + 10.0;
        let r = if *marker == Marker::PathPoint {
            2.5
        } else {
            5.0
        };
        let label = if group.is_empty() { "elections" } else { group };
        writeln!(
            out,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{}"/>
<text class="legend-entry" x="{:.2}" y="{:.2}">{}</text>"##,
            escape(color),
            x + 12.0,
            y + 5.0,
            escape(label)
        )
        .unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

struct MarkerEntry<'a> {
    id: &'a str,
    x: f64,
    y: f64,
    style: &'a Style,
}

pub fn render_svg(layout: &MapLayout, path: &Path) -> Result<()> {
    std::fs::write(path, svg_document(layout))?;
    Ok(())
}
