//! Hand-rolled SVG plots: ROC curves and term-association scatters.

const PALETTE: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn svg_header(width: usize, height: usize, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        width / 2
    )
}

/// ROC plot: one polyline per named curve plus the chance diagonal.
pub fn roc_svg(title: &str, curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h) = (520usize, 520usize);
    let (m_left, m_top, m_right, m_bottom) = (60.0, 40.0, 20.0, 50.0);
    let plot_w = w as f64 - m_left - m_right;
    let plot_h = h as f64 - m_top - m_bottom;
    let px = |fpr: f64| m_left + fpr * plot_w;
    let py = |tpr: f64| m_top + (1.0 - tpr) * plot_h;

    let mut s = svg_header(w, h, title);
    // frame and diagonal
    s.push_str(&format!(
        "<rect x=\"{m_left}\" y=\"{m_top}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>\n\
         <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n",
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    ));
    // axis labels and ticks
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">false positive rate</text>\n\
         <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">true positive rate</text>\n",
        m_left + plot_w / 2.0,
        h as f64 - 12.0,
        m_top + plot_h / 2.0,
        m_top + plot_h / 2.0
    ));
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{t}</text>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{t}</text>\n",
            px(t),
            m_top + plot_h + 16.0,
            m_left - 6.0,
            py(t) + 4.0
        ));
    }
    for (i, (name, points)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            path.join(" ")
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{name}</text>\n",
            m_left + plot_w - 120.0,
            m_top + plot_h - 14.0 * (curves.len() - i) as f64
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// One point of the lexical scatter.
pub struct ScatterPoint {
    pub label: String,
    /// frequency percentile in the positive corpus
    pub x: f64,
    /// frequency percentile in the negative corpus
    pub y: f64,
    pub association: f64,
}

/// Term scatter: frequency percentile in each corpus, colored by which class
/// the term leans toward.
pub fn term_scatter_svg(title: &str, points: &[ScatterPoint], annotate_top: usize) -> String {
    let (w, h) = (560usize, 560usize);
    let (m_left, m_top, m_right, m_bottom) = (60.0, 40.0, 20.0, 50.0);
    let plot_w = w as f64 - m_left - m_right;
    let plot_h = h as f64 - m_top - m_bottom;
    let px = |x: f64| m_left + x * plot_w;
    let py = |y: f64| m_top + (1.0 - y) * plot_h;

    let mut s = svg_header(w, h, title);
    s.push_str(&format!(
        "<rect x=\"{m_left}\" y=\"{m_top}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">frequency percentile, positive class</text>\n\
         <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">frequency percentile, negative class</text>\n",
        m_left + plot_w / 2.0,
        h as f64 - 12.0,
        m_top + plot_h / 2.0,
        m_top + plot_h / 2.0
    ));
    for p in points {
        let color = if p.association > 0.0 {
            "#d62728"
        } else {
            "#1f77b4"
        };
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.7\"/>\n",
            px(p.x),
            py(p.y)
        ));
    }
    // annotate the strongest associations on both sides
    let mut ranked: Vec<&ScatterPoint> = points.iter().collect();
    ranked.sort_by(|a, b| {
        b.association
            .abs()
            .partial_cmp(&a.association.abs())
            .unwrap()
    });
    for p in ranked.iter().take(annotate_top) {
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" \
             fill=\"#333\">{}</text>\n",
            px(p.x) + 4.0,
            py(p.y) - 3.0,
            p.label
        ));
    }
    s.push_str("</svg>\n");
    s
}
