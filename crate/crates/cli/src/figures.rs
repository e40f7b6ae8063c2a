//! Deterministic SVG renderers: node-link diagrams sized by centrality,
//! weighted digraphs with edge labels, and 2x2 heatmap panels comparing a
//! matrix and its dominant spectral summand against their noisy estimates.
//!
//! Layouts are reproducible: callers either supply coordinates or get the
//! spectral layout (Laplacian eigenvectors 2 and 3 of the symmetrized
//! graph), whose sign convention is fixed by the eigensolver.

use anyhow::Result;

use spectral_econ_core::linalg::symmetric_eigen;
use spectral_econ_core::SquareMatrix;

const VIEW_W: f64 = 480.0;
const VIEW_H: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Node positions from file data or the spectral fallback, scaled into the
/// viewport.
pub fn layout(m: &SquareMatrix, coords: Option<&[(f64, f64)]>) -> Result<Vec<(f64, f64)>> {
    let n = m.n();
    let raw: Vec<(f64, f64)> = match coords {
        Some(c) => {
            if c.len() != n {
                anyhow::bail!(spectral_econ_core::Error::InvalidInput(format!(
                    "{} coordinates for {n} nodes",
                    c.len()
                )));
            }
            c.to_vec()
        }
        None => spectral_layout(m)?,
    };
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &raw {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let xspan = (xmax - xmin).max(1e-9);
    let yspan = (ymax - ymin).max(1e-9);
    Ok(raw
        .iter()
        .map(|&(x, y)| {
            (
                MARGIN + (x - xmin) / xspan * (VIEW_W - 2.0 * MARGIN),
                // SVG y grows downward; flip so inputs read naturally.
                VIEW_H - MARGIN - (y - ymin) / yspan * (VIEW_H - 2.0 * MARGIN),
            )
        })
        .collect())
}

fn spectral_layout(m: &SquareMatrix) -> Result<Vec<(f64, f64)>> {
    let n = m.n();
    if n == 1 {
        return Ok(vec![(0.0, 0.0)]);
    }
    let sym = SquareMatrix::from_fn(n, |i, j| 0.5 * (m.get(i, j) + m.get(j, i)).abs());
    let degree: Vec<f64> = (0..n).map(|i| sym.row(i).iter().sum()).collect();
    let laplacian = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            degree[i] - sym.get(i, j)
        } else {
            -sym.get(i, j)
        }
    });
    let eig = symmetric_eigen(&laplacian)?;
    let x = eig.vector(1.min(n - 1));
    let y = if n >= 3 { eig.vector(2) } else { vec![0.0; n] };
    Ok(x.into_iter().zip(y).collect())
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Node-link diagram with radii proportional to the supplied scores.
pub fn node_link_svg(
    m: &SquareMatrix,
    scores: &[f64],
    coords: Option<&[(f64, f64)]>,
) -> Result<String> {
    let n = m.n();
    if scores.len() != n {
        anyhow::bail!(spectral_econ_core::Error::InvalidInput(format!(
            "{} scores for {n} nodes",
            scores.len()
        )));
    }
    let pos = layout(m, coords)?;
    let max_score = scores.iter().fold(0.0f64, |a, s| a.max(s.abs())).max(1e-12);
    let mut svg = svg_open();
    for i in 0..n {
        for j in (i + 1)..n {
            if m.has_edge(i, j) || m.has_edge(j, i) {
                svg.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
                     stroke=\"#555555\" stroke-width=\"1.5\"/>\n",
                    fmt(pos[i].0),
                    fmt(pos[i].1),
                    fmt(pos[j].0),
                    fmt(pos[j].1)
                ));
            }
        }
    }
    for i in 0..n {
        let r = 4.0 + 24.0 * scores[i].abs() / max_score;
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#7fc97f\" stroke=\"#333333\"/>\n",
            fmt(pos[i].0),
            fmt(pos[i].1),
            fmt(r)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt(pos[i].0),
            fmt(pos[i].1 + r + 12.0),
            trim_number(scores[i])
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Weighted digraph with arrowheads and edge weight labels; mutual links
/// are drawn once with arrowheads on both ends.
pub fn digraph_svg(m: &SquareMatrix, coords: Option<&[(f64, f64)]>) -> Result<String> {
    let n = m.n();
    let pos = layout(m, coords)?;
    let mut svg = svg_open();
    svg.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#333333\"/></marker></defs>\n",
    );
    let radius = 14.0;
    for i in 0..n {
        for j in 0..n {
            let forward = m.has_edge(i, j);
            let backward = m.has_edge(j, i);
            if !forward {
                continue;
            }
            if backward && j < i {
                continue; // drawn once from the lower index
            }
            let (x1, y1) = pos[i];
            let (x2, y2) = pos[j];
            let dx = x2 - x1;
            let dy = y2 - y1;
            let len = (dx * dx + dy * dy).sqrt().max(1e-9);
            let (ux, uy) = (dx / len, dy / len);
            let sx = x1 + ux * radius;
            let sy = y1 + uy * radius;
            let ex = x2 - ux * radius;
            let ey = y2 - uy * radius;
            let both = if backward {
                " marker-start=\"url(#arrow)\""
            } else {
                ""
            };
            svg.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" \
                 stroke-width=\"1.6\" marker-end=\"url(#arrow)\"{both}/>\n",
                fmt(sx),
                fmt(sy),
                fmt(ex),
                fmt(ey)
            ));
            let label = if backward && (m.get(i, j) - m.get(j, i)).abs() < 1e-12 {
                trim_number(m.get(i, j))
            } else if backward {
                format!("{}/{}", trim_number(m.get(i, j)), trim_number(m.get(j, i)))
            } else {
                trim_number(m.get(i, j))
            };
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" \
                 fill=\"#aa2222\">{label}</text>\n",
                fmt(0.5 * (sx + ex) + 8.0 * uy),
                fmt(0.5 * (sy + ey) - 8.0 * ux)
            ));
        }
    }
    for i in 0..n {
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{radius}\" fill=\"#ffffff\" stroke=\"#333333\" \
             stroke-width=\"1.5\"/>\n<text x=\"{}\" y=\"{}\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(pos[i].0),
            fmt(pos[i].1),
            fmt(pos[i].0),
            fmt(pos[i].1 + 4.0),
            i + 1
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Blue-white-red diverging color for `value` against the panel scale.
fn diverging_color(value: f64, scale: f64) -> String {
    let t = if scale > 0.0 {
        (value / scale).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let channel = |x: f64| -> u8 { (x.clamp(0.0, 1.0) * 255.0).round() as u8 };
    let (r, g, b) = if t >= 0.0 {
        (1.0, 1.0 - t, 1.0 - t)
    } else {
        (1.0 + t, 1.0 + t, 1.0)
    };
    format!("#{:02x}{:02x}{:02x}", channel(r), channel(g), channel(b))
}

/// One heatmap panel as an SVG group; cells are unit squares.
fn heatmap_group(id: &str, title: &str, m: &SquareMatrix, x0: f64, y0: f64, side: f64) -> String {
    let n = m.n();
    let cell = side / n as f64;
    let scale = m.max_abs();
    let mut g = format!(
        "<g id=\"{id}\" transform=\"translate({x0},{y0})\">\n<text x=\"{}\" y=\"-6\" \
         font-size=\"12\" text-anchor=\"middle\">{title}</text>\n",
        side / 2.0
    );
    for i in 0..n {
        for j in 0..n {
            g.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                fmt(j as f64 * cell),
                fmt(i as f64 * cell),
                fmt(cell),
                fmt(cell),
                diverging_color(m.get(i, j), scale)
            ));
        }
    }
    g.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{side}\" height=\"{side}\" fill=\"none\" \
         stroke=\"#333333\"/>\n</g>\n"
    ));
    g
}

/// The 2x2 comparison: true matrix, its dominant spectral summand, the
/// noisy observation, and the estimated summand.
pub fn heatmap_panels_svg(
    truth: &SquareMatrix,
    true_summand: &SquareMatrix,
    observed: &SquareMatrix,
    estimated_summand: &SquareMatrix,
) -> String {
    let side = 200.0;
    let pad = 40.0;
    let w = 2.0 * side + 3.0 * pad;
    let h = 2.0 * side + 3.0 * pad + 10.0;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n"
    );
    svg.push_str(&heatmap_group("panel-a", "true matrix", truth, pad, pad + 10.0, side));
    svg.push_str(&heatmap_group(
        "panel-b",
        "true first spectral summand",
        true_summand,
        2.0 * pad + side,
        pad + 10.0,
        side,
    ));
    svg.push_str(&heatmap_group(
        "panel-c",
        "observed matrix",
        observed,
        pad,
        2.0 * pad + side + 10.0,
        side,
    ));
    svg.push_str(&heatmap_group(
        "panel-d",
        "estimated first spectral summand",
        estimated_summand,
        2.0 * pad + side,
        2.0 * pad + side + 10.0,
        side,
    ));
    svg.push_str("</svg>\n");
    svg
}

/// `v v^T` as a dense matrix.
pub fn rank_one(v: &[f64]) -> SquareMatrix {
    SquareMatrix::from_fn(v.len(), |i, j| v[i] * v[j])
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{VIEW_W}\" height=\"{VIEW_H}\" \
         viewBox=\"0 0 {VIEW_W} {VIEW_H}\">\n<rect width=\"{VIEW_W}\" height=\"{VIEW_H}\" \
         fill=\"#ffffff\"/>\n"
    )
}

/// Short human label for a weight: integers print bare, others with up to
/// three decimals.
fn trim_number(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Extracts the inner content of a named panel group (test support for the
/// byte-identity checks between panels).
pub fn panel_content(svg: &str, id: &str) -> Option<String> {
    let start_tag = format!("<g id=\"{id}\" ");
    let start = svg.find(&start_tag)?;
    let body_start = svg[start..].find('\n')? + start + 1;
    let end = svg[body_start..].find("</g>")? + body_start;
    // Drop the title line, which differs between panels by design.
    let body = &svg[body_start..end];
    let after_title = body.find('\n')? + 1;
    Some(body[after_title..].to_string())
}
