use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tailscope::io::fmt_f64;
use tailscope::samplers::BodySpec;

/// Output directory plus the provenance written next to each artifact.
pub struct Sink {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Sink {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        let f = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect()).collect();
        tailscope::io::write_csv(self.create(name)?, header, &rows)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    /// `<stem>.provenance.json` next to the artifacts.
    pub fn provenance<T: Serialize>(&self, stem: &str, args: &T, spec: Option<&BodySpec>, outputs: &[String]) -> Result<()> {
        #[derive(Serialize)]
        struct Sidecar<'a, T> {
            version: &'a str,
            args: &'a T,
            #[serde(skip_serializing_if = "Option::is_none")]
            spec: Option<&'a BodySpec>,
            outputs: &'a [String],
        }
        let s = Sidecar { version: env!("CARGO_PKG_VERSION"), args, spec, outputs };
        self.json(&format!("{stem}.provenance.json"), &s)
    }

    pub fn svg(&self, name: &str, plot: &Plot) -> Result<()> {
        let mut w = self.create(name)?;
        w.write_all(plot.render().as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Checks that `dir` is (or can become) a directory before any work starts.
pub fn prepare_dir(dir: &Path) -> std::io::Result<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(std::io::Error::new(std::io::ErrorKind::AlreadyExists, "output path is not a directory"));
    }
    std::fs::create_dir_all(dir)
}

/// Line plot with axes; enough to eyeball a curve.
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

impl Plot {
    pub fn render(&self) -> String {
        let (w, h, m) = (640.0, 400.0, 50.0);
        let pts = self.series.iter().flat_map(|(_, s)| s.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !(x1 > x0) {
            x1 = x0 + 1.0;
        }
        if !(y1 > y0) {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        );
        s += &format!("<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n", w / 2.0, escape(&self.title));
        s += &format!(
            "<path d=\"M{m} {m} V{} H{}\" fill=\"none\" stroke=\"black\"/>\n",
            h - m,
            w - m
        );
        s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", w / 2.0, h - 10.0, escape(&self.x_label));
        s += &format!("<text x=\"{m}\" y=\"{}\">{x0:.3}</text>\n", h - m + 15.0);
        s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{x1:.3}</text>\n", w - m, h - m + 15.0);
        s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y0:.4}</text>\n", m - 4.0, h - m);
        s += &format!("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y1:.4}</text>\n", m - 4.0, m + 4.0);
        for (k, (name, pts)) in self.series.iter().enumerate() {
            let c = COLORS[k % COLORS.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            s += &format!("<polyline fill=\"none\" stroke=\"{c}\" points=\"{}\"/>\n", path.join(" "));
            s += &format!("<text x=\"{}\" y=\"{}\" fill=\"{c}\">{}</text>\n", w - m - 120.0, m + 15.0 * (k as f64 + 1.0), escape(name));
        }
        s += "</svg>\n";
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
