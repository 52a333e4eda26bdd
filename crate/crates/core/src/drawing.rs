//! SVG rendering of two-dimensional embeddings.

use std::fmt::Write as _;

use crate::embed::EmbeddingSet;
use crate::graph::Graph;
use crate::metrics::Partition;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#e7ba52",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub node_radius: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 800.0,
            margin: 40.0,
            node_radius: 5.0,
        }
    }
}

/// Maps embedding coordinates into the drawable box with one scale factor
/// for both axes, centred.
fn fit(e: &EmbeddingSet, style: &Style) -> Vec<(f64, f64)> {
    let n = e.n();
    if n == 0 {
        return vec![];
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for i in 0..n {
        for (a, &x) in e.row(i).iter().enumerate() {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    let box_w = (style.width - 2.0 * style.margin).max(0.0);
    let box_h = (style.height - 2.0 * style.margin).max(0.0);
    let span = [hi[0] - lo[0], hi[1] - lo[1]];
    let scale = match (span[0] > 0.0, span[1] > 0.0) {
        (false, false) => 0.0,
        (true, false) => box_w / span[0],
        (false, true) => box_h / span[1],
        (true, true) => (box_w / span[0]).min(box_h / span[1]),
    };
    let off_x = style.margin + 0.5 * (box_w - scale * span[0]);
    let off_y = style.margin + 0.5 * (box_h - scale * span[1]);
    (0..n)
        .map(|i| {
            let r = e.row(i);
            let x = off_x + scale * (r[0] - lo[0]);
            // screen y grows downwards
            let y = style.height - off_y - scale * (r[1] - lo[1]);
            (
                x.clamp(style.margin, style.width - style.margin),
                y.clamp(style.margin, style.height - style.margin),
            )
        })
        .collect()
}

/// Renders edges as gray lines under vertices drawn as circles, coloured by
/// community when a partition is given.
///
/// # Panics
/// If the embedding is not two-dimensional or its size differs from the
/// graph (or partition).
pub fn draw_svg(
    g: &Graph,
    e: &EmbeddingSet,
    partition: Option<&Partition>,
    style: &Style,
) -> String {
    assert_eq!(e.dim(), 2, "drawing needs a two-dimensional embedding");
    assert_eq!(e.n(), g.n(), "embedding and graph sizes differ");
    if let Some(p) = partition {
        assert_eq!(p.len(), g.n(), "partition and graph sizes differ");
    }
    let pos = fit(e, style);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<g stroke="gray" stroke-opacity="0.5" stroke-width="1">"#
    )
    .unwrap();
    for edge in g.edges() {
        let (a, b) = (pos[edge.u], pos[edge.v]);
        writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.0, a.1, b.0, b.1
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g stroke="black" stroke-width="0.5">"#).unwrap();
    for (i, &(x, y)) in pos.iter().enumerate() {
        let color = partition.map_or(PALETTE[0], |p| PALETTE[p.label(i) % PALETTE.len()]);
        writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{}" fill="{color}"/>"#,
            style.node_radius
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
