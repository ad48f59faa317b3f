//! Static drawing of a planar network.

use std::fmt::Write;

use crate::geometry::Network;

/// Side of the square viewport in pixels.
pub const VIEWPORT: f64 = 800.0;
/// Margin around the boundary bounding box, as a fraction of its larger side.
pub const MARGIN: f64 = 0.05;

/// Renders a network in `R²`. The view box is the bounding box of the
/// boundary points grown by [`MARGIN`]; `labels` are printed next to the
/// boundary vertices.
pub fn render(network: &Network, labels: &[usize]) -> String {
    let tree = network.tree();
    let n = tree.boundary_count();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for k in 0..n {
        let p = network.position(k);
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let pad = span * MARGIN;
    let (x0, y0) = (lo[0] - pad, lo[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    // Flip y so the drawing has the usual orientation.
    let flip = |p: &[f64]| (p[0], hi[1] + lo[1] - p[1]);
    let stroke = span * 0.004;
    let radius = span * 0.01;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEWPORT}" height="{VIEWPORT}" viewBox="{x0} {y0} {w} {h}">"#
    );
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="{stroke}" stroke-linecap="round">"#);
    for &(a, b) in tree.edges() {
        let (ax, ay) = flip(network.position(a));
        let (bx, by) = flip(network.position(b));
        let _ = writeln!(s, r#"<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>"#);
    }
    let _ = writeln!(s, "</g>");
    for v in 0..tree.vertex_count() {
        let (x, y) = flip(network.position(v));
        if tree.is_boundary(v) {
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{radius}" fill="black"/>"#);
            let label = labels.get(v).copied().unwrap_or(v + 1);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="{}" font-family="sans-serif">v{label}</text>"#,
                x + 1.5 * radius,
                y - 1.5 * radius,
                span * 0.035
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle cx="{x}" cy="{y}" r="{}" fill="white" stroke="black" stroke-width="{stroke}"/>"#,
                radius * 0.6
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryConfig;
    use crate::topology::Tree;

    #[test]
    fn draws_every_edge_and_vertex() {
        let t = Tree::new(4, 3, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.8]]).unwrap();
        let net = Network::new(t, &z, &[0.5, 0.3]).unwrap();
        let svg = render(&net, &[1, 2, 3, 4]);
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains(r#"viewBox="-0.05 -0.05 1.1 0.9"#), "{svg}");
    }
}
