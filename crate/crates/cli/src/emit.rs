//! CSV, JSON and SVG emission. Floats use shortest round-trip decimals, so
//! identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Empty cell for `None`.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn csv_string(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

/// Where artifacts go: files in a directory, or stdout.
pub struct Sink {
    dir: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> CliResult<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        Ok(Sink { dir: dir.map(Path::to_path_buf), written: Vec::new() })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` into the directory. Without a directory nothing is
    /// written unless `primary`, in which case the text goes to stdout.
    pub fn emit(&mut self, name: &str, text: &str, primary: bool) -> CliResult<()> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
                self.written.push(path);
            }
            None if primary => print!("{text}"),
            None => {}
        }
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
    /// Horizontal reference line.
    pub level: Option<(f64, &'a str)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

impl Plot<'_> {
    pub fn svg(&self) -> String {
        let (w, h, ml, mr, mt, mb) = (720.0, 440.0, 80.0, 20.0, 40.0, 60.0);
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };
        let usable = |x: f64, y: f64| tx(x).is_finite() && ty(y).is_finite();
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = xs;
        for s in &self.series {
            for &(x, y) in s.points.iter().filter(|p| usable(p.0, p.1)) {
                xs = (xs.0.min(tx(x)), xs.1.max(tx(x)));
                ys = (ys.0.min(ty(y)), ys.1.max(ty(y)));
            }
        }
        if let Some((l, _)) = self.level {
            if ty(l).is_finite() {
                ys = (ys.0.min(ty(l)), ys.1.max(ty(l)));
            }
        }
        let widen = |r: (f64, f64)| {
            if !(r.0 <= r.1) {
                (0.0, 1.0)
            } else if r.0 == r.1 {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                r
            }
        };
        let (xs, ys) = (widen(xs), widen(ys));
        let px = |x: f64| ml + (tx(x) - xs.0) / (xs.1 - xs.0) * (w - ml - mr);
        let py = |y: f64| h - mb - (ty(y) - ys.0) / (ys.1 - ys.0) * (h - mt - mb);
        let label = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.4}") };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            w / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - ml - mr,
            h - mt - mb
        );
        for (v, anchor, x) in [(xs.0, "start", ml), (xs.1, "end", w - mr)] {
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" text-anchor="{anchor}">{}</text>"#,
                h - mb + 16.0,
                label(v, self.log_x)
            );
        }
        for (v, y) in [(ys.0, h - mb), (ys.1, mt + 10.0)] {
            let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, ml - 6.0, label(v, self.log_y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            w / 2.0,
            h - 16.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            escape(self.y_label)
        );
        if let Some((l, name)) = self.level {
            if ty(l).is_finite() {
                let y = py(l);
                let _ = writeln!(
                    s,
                    r#"<line x1="{ml}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
                    w - mr
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{:.2}" text-anchor="end" fill="gray">{}</text>"#,
                    w - mr - 4.0,
                    y - 4.0,
                    escape(name)
                );
            }
        }
        for (i, ser) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = ser
                .points
                .iter()
                .filter(|p| usable(p.0, p.1))
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
                ml + 10.0,
                mt + 18.0 + 16.0 * i as f64,
                escape(ser.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
