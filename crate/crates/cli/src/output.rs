//! File emission with fixed number formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::Common;

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus rows of preformatted cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push_nums(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|v| num(*v)).collect());
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub struct Sink<'a> {
    common: &'a Common,
    pub written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    pub fn new(common: &'a Common) -> Result<Self, CliError> {
        fs::create_dir_all(&common.out_dir)?;
        Ok(Self { common, written: Vec::new() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.common.out_dir.join(name)
    }

    /// Write a table; echo it on stdout when `main` and `--csv` is set.
    pub fn table(&mut self, name: &str, t: &Table, main: bool) -> Result<(), CliError> {
        let text = t.to_csv()?;
        self.write(name, &text)?;
        if main && self.common.csv {
            print!("{text}");
        }
        Ok(())
    }

    /// Write a JSON report; echo it on stdout when `main` and `--json` is set.
    pub fn json<T: Serialize>(&mut self, name: &str, v: &T, main: bool) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(v)? + "\n";
        self.write(name, &text)?;
        if main && self.common.json {
            print!("{text}");
        }
        Ok(())
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, text)?;
        self.written.push(p);
        Ok(())
    }

    /// Human summary on stdout unless a machine format goes there.
    pub fn finish(&self, summary: &str) {
        if !self.common.json && !self.common.csv {
            println!("{summary}");
            for p in &self.written {
                println!("  wrote {}", display(p));
            }
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// Parse a comma-separated 3-vector.
pub fn parse_vec3(s: &str) -> Result<ledlab::Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (o, p) in v.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| format!("bad number '{p}'"))?;
    }
    Ok(ledlab::Vec3::new(v[0], v[1], v[2]))
}
