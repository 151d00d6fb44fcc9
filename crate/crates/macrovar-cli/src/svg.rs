//! Self-contained SVG charts: an m-by-m grid of impulse-response panels
//! (point path plus band polygon per response/shock pair) and a simple
//! multi-series line chart for simulated paths. Text output only, no
//! rendering dependency; coordinates are written with fixed precision so
//! equal inputs give byte-equal files.

use macrovar::var::IrfResult;

const PANEL_W: f64 = 330.0;
const PANEL_H: f64 = 230.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 40.0;
const HEADER_H: f64 = 52.0;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if a >= 1e5 || a < 1e-3 {
        format!("{v:.2e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    min: f64,
    max: f64,
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    steps: f64,
}

impl Scale {
    fn x(&self, h: usize) -> f64 {
        self.x0 + self.w * h as f64 / self.steps
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + self.h * (1.0 - (v - self.min) / (self.max - self.min))
    }
}

/// Impulse-response grid: rows are responding variables, columns are
/// shocks. Bands render when the result carries them.
pub fn irf_chart(irf: &IrfResult, title: &str, description: &str) -> String {
    let m = irf.ordering.len();
    let horizon = irf.horizon();
    let width = MARGIN_L + m as f64 * PANEL_W + MARGIN_R;
    let height = HEADER_H + m as f64 * PANEL_H + MARGIN_B;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n",
        fmt(width), fmt(height), fmt(width), fmt(height)
    ));
    out.push_str(&format!("<desc>{}</desc>\n", escape(description)));
    out.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        fmt(width),
        fmt(height)
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        fmt(width / 2.0),
        escape(title)
    ));

    for i in 0..m {
        for j in 0..m {
            let x0 = MARGIN_L + j as f64 * PANEL_W + 8.0;
            let y0 = HEADER_H + i as f64 * PANEL_H + MARGIN_T;
            let w = PANEL_W - MARGIN_L / 2.0 - MARGIN_R;
            let h = PANEL_H - MARGIN_T - MARGIN_B;

            // value range over point and any bands
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for hh in 0..=horizon {
                lo = lo.min(irf.point[hh][(i, j)]);
                hi = hi.max(irf.point[hh][(i, j)]);
                if let Some(bands) = &irf.bands {
                    lo = lo.min(bands.lower[hh][(i, j)]);
                    hi = hi.max(bands.upper[hh][(i, j)]);
                }
            }
            lo = lo.min(0.0);
            hi = hi.max(0.0);
            let pad = 0.05 * (hi - lo).max(1e-12);
            let scale = Scale {
                min: lo - pad,
                max: hi + pad,
                x0,
                y0,
                w,
                h,
                steps: horizon.max(1) as f64,
            };

            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{} response to {} shock</text>\n",
                fmt(x0 + w / 2.0),
                fmt(y0 - 10.0),
                escape(&irf.ordering[i]),
                escape(&irf.ordering[j])
            ));
            // frame and zero line
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
                fmt(x0), fmt(y0), fmt(w), fmt(h)
            ));
            let zero_y = scale.y(0.0);
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n",
                fmt(x0), fmt(zero_y), fmt(x0 + w), fmt(zero_y)
            ));

            if let Some(bands) = &irf.bands {
                let mut pts = String::new();
                for hh in 0..=horizon {
                    pts.push_str(&format!(
                        "{},{} ",
                        fmt(scale.x(hh)),
                        fmt(scale.y(bands.upper[hh][(i, j)]))
                    ));
                }
                for hh in (0..=horizon).rev() {
                    pts.push_str(&format!(
                        "{},{} ",
                        fmt(scale.x(hh)),
                        fmt(scale.y(bands.lower[hh][(i, j)]))
                    ));
                }
                out.push_str(&format!(
                    "<polygon points=\"{}\" fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"none\"/>\n",
                    pts.trim_end()
                ));
            }

            let mut pts = String::new();
            for hh in 0..=horizon {
                pts.push_str(&format!(
                    "{},{} ",
                    fmt(scale.x(hh)),
                    fmt(scale.y(irf.point[hh][(i, j)]))
                ));
            }
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>\n",
                pts.trim_end()
            ));

            // y ticks at range ends and zero; x ticks at 0, mid, H
            for v in [scale.min, 0.0, scale.max] {
                out.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"end\">{}</text>\n",
                    fmt(x0 - 4.0),
                    fmt(scale.y(v) + 3.0),
                    fmt_tick(v)
                ));
            }
            for hh in [0, horizon / 2, horizon] {
                out.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
                    fmt(scale.x(hh)),
                    fmt(y0 + h + 14.0),
                    hh
                ));
            }
            if i == m - 1 {
                out.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">horizon</text>\n",
                    fmt(x0 + w / 2.0),
                    fmt(y0 + h + 30.0)
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use macrovar::numerics::Matrix;
    use macrovar::var::{IrfBands, IrfResult};

    fn toy_irf(with_bands: bool) -> IrfResult {
        let point: Vec<Matrix> = (0..=4)
            .map(|h| {
                Matrix::from_rows(&[
                    vec![0.5_f64.powi(h), 0.1 * h as f64],
                    vec![-(0.3_f64.powi(h)), 0.2],
                ])
                .unwrap()
            })
            .collect();
        let bands = with_bands.then(|| IrfBands {
            lower: point.iter().map(|m| m.scaled(0.5)).collect(),
            upper: point.iter().map(|m| m.scaled(1.5)).collect(),
            replications: 100,
            level: 0.9,
            seed: 1,
        });
        IrfResult {
            ordering: vec!["gdp".into(), "rate".into()],
            point,
            bands,
        }
    }

    #[test]
    fn renders_all_panels_and_escapes() {
        let svg = irf_chart(&toy_irf(true), "t < 1 & done", "seed=1");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg.matches("<polygon").count(), 4);
        assert!(svg.contains("gdp response to rate shock"));
        assert!(svg.contains("t &lt; 1 &amp; done"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn bands_are_optional_and_output_is_deterministic() {
        let bare = irf_chart(&toy_irf(false), "x", "d");
        assert_eq!(bare.matches("<polygon").count(), 0);
        assert_eq!(bare, irf_chart(&toy_irf(false), "x", "d"));
    }
}
