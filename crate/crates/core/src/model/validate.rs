use std::fmt;

use super::Instance;

/// One broken invariant of an [`Instance`]. Years are reported 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroHorizon,
    Budget(f64),
    CapLength { expected: usize, got: usize },
    Cap { year: usize, value: f64 },
    NoClusters,
    ClusterId { position: usize, id: usize },
    EmptyCluster { cluster: usize },
    ScheduleLength {
        cluster: usize,
        project: usize,
        field: &'static str,
        expected: usize,
        got: usize,
    },
    Entry {
        cluster: usize,
        project: usize,
        field: &'static str,
        year: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroHorizon => write!(f, "horizon must be at least one year"),
            Violation::Budget(b) => write!(f, "budget {b} must be finite and non-negative"),
            Violation::CapLength { expected, got } => {
                write!(f, "cap length {got} != horizon {expected}")
            }
            Violation::Cap { year, value } => {
                write!(f, "cap in year {year} is {value}, must be finite and non-negative")
            }
            Violation::NoClusters => write!(f, "instance has no clusters"),
            Violation::ClusterId { position, id } => {
                write!(f, "cluster at position {position} declares id {id}")
            }
            Violation::EmptyCluster { cluster } => write!(f, "cluster {cluster} has no projects"),
            Violation::ScheduleLength {
                cluster,
                project,
                field,
                expected,
                got,
            } => write!(
                f,
                "cluster {cluster} project {project}: {field} has length {got}, expected {expected}"
            ),
            Violation::Entry {
                cluster,
                project,
                field,
                year,
                value,
            } => write!(
                f,
                "cluster {cluster} project {project}: {field} in year {year} is {value}"
            ),
        }
    }
}

fn bad(v: f64) -> bool {
    !v.is_finite() || v < 0.0
}

/// Every invariant violation of `instance`; empty means the instance is usable.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let horizon = instance.horizon;
    let mut report = Vec::new();
    if horizon == 0 {
        report.push(Violation::ZeroHorizon);
    }
    if bad(instance.budget) {
        report.push(Violation::Budget(instance.budget));
    }
    if instance.cap.len() != horizon {
        report.push(Violation::CapLength {
            expected: horizon,
            got: instance.cap.len(),
        });
    }
    for (i, &value) in instance.cap.iter().enumerate() {
        if bad(value) {
            report.push(Violation::Cap { year: i + 1, value });
        }
    }
    if instance.clusters.is_empty() {
        report.push(Violation::NoClusters);
    }
    for (k, cluster) in instance.clusters.iter().enumerate() {
        if let Some(id) = cluster.id {
            if id != k {
                report.push(Violation::ClusterId { position: k, id });
            }
        }
        if cluster.projects.is_empty() {
            report.push(Violation::EmptyCluster { cluster: k });
        }
        for (i, project) in cluster.projects.iter().enumerate() {
            let fields: [(&'static str, &[f64]); 3] = [
                ("production", &project.production),
                ("cost_schedule", &project.cost_schedule),
                ("revenue", &project.revenue),
            ];
            for (field, values) in fields {
                if values.len() != horizon {
                    report.push(Violation::ScheduleLength {
                        cluster: k,
                        project: i,
                        field,
                        expected: horizon,
                        got: values.len(),
                    });
                }
                for (t, &value) in values.iter().enumerate() {
                    if bad(value) {
                        report.push(Violation::Entry {
                            cluster: k,
                            project: i,
                            field,
                            year: t + 1,
                            value,
                        });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::*;

    fn two_clusters() -> Instance {
        instance(
            3,
            100.0,
            10.0,
            vec![
                vec![project(&[1.0, 2.0, 1.0], &[5.0, 0.0, 0.0], &[4.0, 8.0, 4.0])],
                vec![
                    project(&[3.0, 1.0, 0.0], &[7.0, 1.0, 0.0], &[9.0, 3.0, 0.0]),
                    project(&[0.0; 3], &[0.0; 3], &[0.0; 3]),
                ],
            ],
        )
    }

    #[test]
    fn well_formed_instance_has_empty_report() {
        assert!(validate_instance(&two_clusters()).is_empty());
    }

    #[test]
    fn short_cap_is_reported_once() {
        let mut inst = two_clusters();
        inst.cap.pop();
        let report = validate_instance(&inst);
        assert_eq!(report, vec![Violation::CapLength { expected: 3, got: 2 }]);
        assert!(inst.ensure_valid().is_err());
    }

    #[test]
    fn negative_entry_names_its_location() {
        let mut inst = two_clusters();
        inst.clusters[1].projects[0].production[2] = -1.0;
        let report = validate_instance(&inst);
        assert_eq!(
            report,
            vec![Violation::Entry {
                cluster: 1,
                project: 0,
                field: "production",
                year: 3,
                value: -1.0
            }]
        );
        let text = report[0].to_string();
        assert!(text.contains("cluster 1") && text.contains("project 0") && text.contains("year 3"));
    }

    #[test]
    fn structural_problems() {
        let mut inst = two_clusters();
        inst.clusters[0].projects.clear();
        inst.clusters[1].id = Some(7);
        inst.budget = f64::NAN;
        let report = validate_instance(&inst);
        assert!(report.contains(&Violation::EmptyCluster { cluster: 0 }));
        assert!(report.contains(&Violation::ClusterId { position: 1, id: 7 }));
        assert_eq!(report.len(), 3);

        let empty = instance(0, 0.0, 0.0, vec![]);
        let report = validate_instance(&empty);
        assert!(report.contains(&Violation::ZeroHorizon));
        assert!(report.contains(&Violation::NoClusters));
    }
}
