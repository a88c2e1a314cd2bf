use std::io::{self, Write};

/// Formats `x` with 6 significant digits, switching to exponent notation
/// outside `[1e-5, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn num(x: f64) -> String {
    sig6(x)
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

/// A CSV table with a fixed header.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Flat `key=value` record of a run.
#[derive(Debug, Default)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, out: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }

    /// Recorded command-line arguments, in order.
    pub fn parse_args(text: &str) -> Vec<String> {
        text.lines()
            .filter_map(|line| line.split_once('='))
            .filter(|(k, _)| k.starts_with("arg."))
            .map(|(_, v)| v.to_string())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.123456789), "0.123457");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
        assert_eq!(sig6(-2.25), "-2.25");
        assert_eq!(sig6(0.00012345678), "0.000123457");
        assert_eq!(sig6(4480477.5), "4.48048e6");
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::default();
        m.set("command", "bound");
        m.set("arg.0", "dyncache");
        m.set("arg.1", "--b=a=b");
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(Manifest::parse_args(&text), ["dyncache", "--b=a=b"]);
    }
}
