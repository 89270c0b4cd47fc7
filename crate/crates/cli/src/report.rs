//! The run report and its text, JSON and LaTeX renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use toda_core::arith::{QSeries, RatFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub order: usize,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub series: Vec<SeriesEntry>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            config: BTreeMap::new(),
            series: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn set_series(&mut self, name: &str, variable: &str, s: &QSeries<RatFn>) {
        self.set("series", name);
        self.set("variable", variable);
        self.series = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(order, c)| SeriesEntry {
                order,
                coefficient: c.to_string(),
            })
            .collect();
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("toda {}\n", self.command);
        for (k, v) in &self.config {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        let var = self.config.get("variable").map(String::as_str).unwrap_or("q");
        let name = self.config.get("series").map(String::as_str).unwrap_or("series");
        out.push_str(&format!("{name}:\n"));
        for e in &self.series {
            out.push_str(&format!("  {var}^{}: {}\n", e.order, e.coefficient));
        }
        let nonzero: Vec<String> = self
            .series
            .iter()
            .filter(|e| e.coefficient != "0")
            .map(|e| term_text(&e.coefficient, var, e.order))
            .collect();
        let sum = if nonzero.is_empty() { "0".to_string() } else { nonzero.join(" + ") };
        out.push_str(&format!("  {name} = {sum} + O({var}^{})\n", self.series.len()));
        out.push_str("checks:\n");
        for c in &self.checks {
            let tag = if c.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("  [{tag}] {}: {}\n", c.name, c.detail));
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let var = self.config.get("variable").map(String::as_str).unwrap_or("q");
        let name = self.config.get("series").map(String::as_str).unwrap_or("F");
        let terms: Vec<String> = self
            .series
            .iter()
            .filter(|e| e.coefficient != "0")
            .map(|e| {
                let c = latex_coefficient(&e.coefficient);
                match e.order {
                    0 => c,
                    1 => format!("{c}\\,{var}"),
                    n => format!("{c}\\,{var}^{{{n}}}"),
                }
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let mut out = format!(
            "% toda {}\n\\[ {} = {} + O({var}^{{{}}}) \\]\n",
            self.command,
            latex_name(name),
            body,
            self.series.len()
        );
        for c in &self.checks {
            out.push_str(&format!("% [{}] {}: {}\n", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

fn term_text(coeff: &str, var: &str, order: usize) -> String {
    let wrapped = if coeff.contains(['+', '/']) || coeff[1..].contains('-') {
        format!("({coeff})")
    } else {
        coeff.to_string()
    };
    match (order, coeff) {
        (0, _) => coeff.to_string(),
        (1, "1") => var.to_string(),
        (n, "1") => format!("{var}^{n}"),
        (1, _) => format!("{wrapped}*{var}"),
        (n, _) => format!("{wrapped}*{var}^{n}"),
    }
}

fn latex_name(name: &str) -> String {
    let base = name.split_whitespace().next().unwrap_or(name);
    match base {
        "F_inst" => "F^{\\mathrm{inst}}".into(),
        "Phi" => "\\Phi".into(),
        other => other.into(),
    }
}

fn latex_poly(p: &str) -> String {
    let p = p.trim_start_matches('(').trim_end_matches(')');
    let mut out = String::new();
    let mut chars = p.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '*' => out.push(' '),
            '^' => {
                let mut e = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    e.push(*d);
                    chars.next();
                }
                out.push_str(&format!("^{{{e}}}"));
            }
            c if c.is_ascii_alphabetic() => {
                let mut w = String::from(c);
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_alphanumeric()) {
                    w.push(*d);
                    chars.next();
                }
                out.push_str(&latex_var(&w));
            }
            c => out.push(c),
        }
    }
    out
}

fn latex_var(w: &str) -> String {
    match w {
        "hbar" => "\\hbar".into(),
        "kappa" => "\\kappa".into(),
        "e1" => "\\epsilon_1".into(),
        "e2" => "\\epsilon_2".into(),
        _ => {
            let (head, tail) = w.split_at(w.find(|c: char| c.is_ascii_digit()).unwrap_or(w.len()));
            if tail.is_empty() {
                head.to_string()
            } else {
                format!("{head}_{{{tail}}}")
            }
        }
    }
}

/// `num/den` as `\frac{num}{den}`.
pub fn latex_coefficient(c: &str) -> String {
    let mut depth = 0i32;
    for (i, ch) in c.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                return format!("\\frac{{{}}}{{{}}}", latex_poly(&c[..i]).trim(), latex_poly(&c[i + 1..]).trim());
            }
            _ => {}
        }
    }
    latex_poly(c).trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latex_fractions() {
        assert_eq!(latex_coefficient("1/a1^2"), "\\frac{1}{a_{1}^{2}}");
        assert_eq!(latex_coefficient("-8/(hbar^2-4*a1^2)"), "\\frac{-8}{\\hbar^{2}-4 a_{1}^{2}}");
        assert_eq!(latex_coefficient("3"), "3");
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("nekrasov");
        r.set("n", 1);
        r.set_series("F_inst", "Q", &QSeries::new(vec![RatFn::zero(), RatFn::one()]));
        r.check("regular", true, "ok");
        let s = r.to_json();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), s);
        assert!(r.to_text().contains("F_inst = Q + O(Q^2)"));
    }
}
