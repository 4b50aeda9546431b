use std::fmt::Write as _;

use super::{candidates, expand, prepare};
use crate::error::Result;
use crate::model::{DiscountConfig, Instance};

/// Which problem to write out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MilpVariant {
    /// Every project at every shift, with the budget row.
    Full,
    /// Only the given project per cluster, at any shift, without the budget row.
    FixedProjects(Vec<Option<usize>>),
}

/// Binary variable for launching project `project` of cluster `cluster` with
/// delay `shift`. All indices are 0-based.
pub fn variable_name(cluster: usize, project: usize, shift: usize) -> String {
    format!("x_{cluster}_{project}_{shift}")
}

const TERMS_PER_LINE: usize = 8;

/// Shortest decimal that parses back to exactly `v`.
fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-6..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

struct Row<'a> {
    out: &'a mut String,
    terms: usize,
}

impl<'a> Row<'a> {
    fn start(out: &'a mut String, name: &str) -> Self {
        let _ = write!(out, " {name}:");
        Row { out, terms: 0 }
    }

    fn term(&mut self, coef: f64, var: &str) {
        if self.terms > 0 {
            if self.terms.is_multiple_of(TERMS_PER_LINE) {
                self.out.push_str("\n   ");
            }
            self.out.push_str(" +");
        }
        if coef == 1.0 {
            let _ = write!(self.out, " {var}");
        } else {
            let _ = write!(self.out, " {} {var}", number(coef));
        }
        self.terms += 1;
    }

    fn finish(self, placeholder: &str, rhs: Option<f64>) {
        if self.terms == 0 {
            let _ = write!(self.out, " 0 {placeholder}");
        }
        if let Some(rhs) = rhs {
            let _ = write!(self.out, " <= {}", number(rhs));
        }
        self.out.push('\n');
    }
}

/// The problem as an LP-format binary program.
///
/// Variants that produce nothing and earn nothing inside the horizon are not
/// written. When no variable remains, a single unused `x_none` keeps the file
/// well formed.
pub fn export_milp(instance: &Instance, config: &DiscountConfig, variant: &MilpVariant) -> Result<String> {
    prepare(instance, config)?;
    let fixed = match variant {
        MilpVariant::Full => None,
        MilpVariant::FixedProjects(selection) => Some(selection.as_slice()),
    };
    let options = expand(instance, config, &candidates(instance, fixed)?);

    struct Var {
        cluster: usize,
        name: String,
        cost: f64,
        profit: f64,
        production: Vec<f64>,
    }
    let mut vars = Vec::new();
    for (k, launches) in options.into_iter().enumerate() {
        for launch in launches {
            let v = launch.variant;
            if v.is_empty() {
                continue;
            }
            vars.push(Var {
                cluster: k,
                name: variable_name(k, launch.project, v.shift),
                cost: v.cost,
                profit: v.profit,
                production: v.production,
            });
        }
    }
    let placeholder = vars.first().map_or_else(|| "x_none".to_owned(), |v| v.name.clone());

    let mut out = String::new();
    out.push_str("Maximize\n");
    let mut row = Row::start(&mut out, "obj");
    for v in vars.iter().filter(|v| v.profit != 0.0) {
        row.term(v.profit, &v.name);
    }
    row.finish(&placeholder, None);

    out.push_str("Subject To\n");
    if fixed.is_none() {
        let mut row = Row::start(&mut out, "budget");
        for v in vars.iter().filter(|v| v.cost != 0.0) {
            row.term(v.cost, &v.name);
        }
        row.finish(&placeholder, Some(instance.budget));
    }
    for k in 0..instance.cluster_count() {
        let mut members = vars.iter().filter(|v| v.cluster == k).peekable();
        if members.peek().is_none() {
            continue;
        }
        let mut row = Row::start(&mut out, &format!("choice_{k}"));
        for v in members {
            row.term(1.0, &v.name);
        }
        row.finish(&placeholder, Some(1.0));
    }
    for (t, &cap) in instance.cap.iter().enumerate() {
        let mut row = Row::start(&mut out, &format!("cap_{}", t + 1));
        for v in vars.iter().filter(|v| v.production[t] != 0.0) {
            row.term(v.production[t], &v.name);
        }
        row.finish(&placeholder, Some(cap));
    }

    out.push_str("Binary\n");
    if vars.is_empty() {
        out.push_str(" x_none\n");
    }
    for v in &vars {
        let _ = writeln!(out, " {}", v.name);
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::*;
    use proptest::prelude::*;

    fn section<'a>(text: &'a str, start: &str, end: &str) -> Vec<&'a str> {
        let a = text.find(start).unwrap() + start.len();
        let b = text[a..].find(end).unwrap() + a;
        text[a..b].lines().filter(|l| !l.trim().is_empty()).collect()
    }

    #[test]
    fn structure_of_a_single_project() {
        let inst = instance(2, 500.0, 50.0, vec![vec![project(&[40.0, 40.0], &[400.0, 0.0], &[6000.0, 6072.0])]]);
        let cfg = DiscountConfig::new(1.0, Some(0));
        let text = export_milp(&inst, &cfg, &MilpVariant::Full).unwrap();
        assert_eq!(
            text,
            "Maximize\n obj: 12072 x_0_0_0\nSubject To\n budget: 400 x_0_0_0 <= 500\n \
             choice_0: x_0_0_0 <= 1\n cap_1: 40 x_0_0_0 <= 50\n cap_2: 40 x_0_0_0 <= 50\n\
             Binary\n x_0_0_0\nEnd\n"
        );
    }

    #[test]
    fn two_shifts_count() {
        let inst = instance(2, 500.0, 50.0, vec![vec![project(&[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0])]]);
        let text = export_milp(&inst, &DiscountConfig::default(), &MilpVariant::Full).unwrap();
        assert_eq!(section(&text, "Binary\n", "End").len(), 2);
        let rows = section(&text, "Subject To\n", "Binary");
        assert_eq!(rows.iter().filter(|r| r.contains("budget:")).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.contains("choice_")).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.contains("cap_")).count(), 2);
    }

    #[test]
    fn fixed_variant_drops_budget_and_other_projects() {
        let a = project(&[1.0, 1.0, 0.0], &[5.0, 0.0, 0.0], &[3.0, 3.0, 0.0]);
        let b = project(&[2.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[4.0, 0.0, 0.0]);
        let inst = instance(3, 2.0, 2.0, vec![vec![a, b.clone()], vec![b]]);
        let cfg = DiscountConfig::default();
        let text = export_milp(&inst, &cfg, &MilpVariant::FixedProjects(vec![Some(1), None])).unwrap();
        assert!(!text.contains("budget"));
        assert!(!text.contains("x_0_0_"));
        assert!(!text.contains("x_1_"));
        assert!(!text.contains("choice_1"));
        let binaries = section(&text, "Binary\n", "End");
        assert_eq!(binaries, vec![" x_0_1_0", " x_0_1_1", " x_0_1_2"]);
    }

    #[test]
    fn empty_shift_variants_are_dropped_and_rows_stay_well_formed() {
        // a late producer shifted by a year leaves the horizon entirely
        let p = project(&[0.0, 3.0], &[1.0, 0.0], &[0.0, 2.0]);
        let inst = instance(2, 5.0, 4.0, vec![vec![p]]);
        let text = export_milp(&inst, &DiscountConfig::default(), &MilpVariant::Full).unwrap();
        assert!(text.contains("x_0_0_0"));
        assert!(!text.contains("x_0_0_1"));
        assert!(text.contains(" cap_1: 0 x_0_0_0 <= 4\n"));

        let none = instance(1, 5.0, 4.0, vec![vec![project(&[0.0], &[1.0], &[0.0])]]);
        let text = export_milp(&none, &DiscountConfig::default(), &MilpVariant::Full).unwrap();
        assert!(text.contains("obj: 0 x_none") && text.contains("Binary\n x_none\nEnd"));
    }

    #[test]
    fn long_rows_are_wrapped() {
        let projects = (0..20).map(|i| project(&[1.0], &[1.0], &[f64::from(i) + 1.0])).collect();
        let inst = instance(1, 5.0, 4.0, vec![projects]);
        let text = export_milp(&inst, &DiscountConfig::default(), &MilpVariant::Full).unwrap();
        assert!(text.lines().all(|l| l.len() < 255));
        assert_eq!(section(&text, "Binary\n", "End").len(), 20);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 12072.0, 1e-9, 7.25e17, 123456.789, 0.0] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(number(0.1), "0.1");
        assert_eq!(number(1e-9), "1e-9");
    }

    proptest! {
        #[test]
        fn coefficients_round_trip(v in proptest::num::f64::POSITIVE | proptest::num::f64::ZERO) {
            prop_assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }

        #[test]
        fn variable_count_matches_non_empty_variants(
            d in proptest::collection::vec(0u32..3, 4), r in proptest::collection::vec(0u32..3, 4), shift in 0usize..4
        ) {
            let f = |v: &Vec<u32>| v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
            let p = project(&f(&d), &[1.0, 0.0, 0.0, 0.0], &f(&r));
            let inst = instance(4, 5.0, 4.0, vec![vec![p.clone(), p]]);
            let cfg = DiscountConfig::new(0.9, Some(shift));
            let text = export_milp(&inst, &cfg, &MilpVariant::Full).unwrap();
            let expected: usize = (0..=shift)
                .filter(|&s| !crate::model::shift_project(&inst.clusters[0].projects[0], s, &cfg, 4).unwrap().is_empty())
                .count() * 2;
            let declared = section(&text, "Binary\n", "End");
            if expected == 0 {
                prop_assert_eq!(declared, vec![" x_none"]);
            } else {
                prop_assert_eq!(declared.len(), expected);
            }
            prop_assert_eq!(text.clone(), export_milp(&inst, &cfg, &MilpVariant::Full).unwrap());
        }
    }
}
