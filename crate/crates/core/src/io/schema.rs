use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::IoError;
use crate::model::{
    BoundingBox, Instance, Matching, Member, PairAssignment, Params, Point, SkillCatalog, Task, Worker,
};

pub const SCHEMA_VERSION: u32 = 1;

/// A parsed value plus the unknown fields that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub alpha: f64,
    pub beta: f64,
    pub money_scale: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDoc {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDoc {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub arrival: f64,
    pub r: f64,
    pub b: f64,
    pub skills: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerDoc {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub arrival: f64,
    pub skills: Vec<String>,
}

/// On-disk instance, version 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub schema_version: u32,
    pub catalog: BTreeMap<String, f64>,
    pub params: ParamsDoc,
    pub tasks: Vec<TaskDoc>,
    pub workers: Vec<WorkerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding_box: Option<BoxDoc>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        let cat = instance.catalog();
        InstanceDoc {
            schema_version: SCHEMA_VERSION,
            catalog: cat.entries().map(|(id, fee)| (id.to_string(), fee)).collect(),
            params: ParamsDoc {
                alpha: instance.params().alpha(),
                beta: instance.params().beta(),
                money_scale: instance.params().money_scale(),
            },
            tasks: instance
                .tasks()
                .iter()
                .map(|t| TaskDoc {
                    id: t.id.clone(),
                    x: t.location.x,
                    y: t.location.y,
                    arrival: t.arrival_time,
                    r: t.fixed_radius,
                    b: t.extra_budget,
                    skills: cat.names(t.required_skills),
                })
                .collect(),
            workers: instance
                .workers()
                .iter()
                .map(|w| WorkerDoc {
                    id: w.id.clone(),
                    x: w.location.x,
                    y: w.location.y,
                    arrival: w.arrival_time,
                    skills: cat.names(w.skills),
                })
                .collect(),
            bounding_box: instance.bounding_box().map(|b| BoxDoc {
                min_x: b.min.x,
                min_y: b.min.y,
                max_x: b.max.x,
                max_y: b.max.y,
            }),
        }
    }

    pub fn into_instance(self) -> Result<Instance, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IoError::Version(self.schema_version));
        }
        let catalog = SkillCatalog::new(self.catalog)?;
        let params = Params::new(self.params.alpha, self.params.beta, self.params.money_scale)?;
        let resolve = |path: String, ids: &[String]| {
            catalog.resolve(ids).map_err(|e| IoError::Schema {
                path,
                message: e.to_string(),
            })
        };
        let mut tasks = Vec::with_capacity(self.tasks.len());
        for (i, t) in self.tasks.into_iter().enumerate() {
            let required_skills = resolve(format!("tasks[{i}].skills"), &t.skills)?;
            tasks.push(Task {
                id: t.id,
                location: Point::new(t.x, t.y),
                arrival_time: t.arrival,
                fixed_radius: t.r,
                extra_budget: t.b,
                required_skills,
            });
        }
        let mut workers = Vec::with_capacity(self.workers.len());
        for (i, w) in self.workers.into_iter().enumerate() {
            let skills = resolve(format!("workers[{i}].skills"), &w.skills)?;
            workers.push(Worker {
                id: w.id,
                location: Point::new(w.x, w.y),
                arrival_time: w.arrival,
                skills,
            });
        }
        let bbox = self
            .bounding_box
            .map(|b| BoundingBox::new(Point::new(b.min_x, b.min_y), Point::new(b.max_x, b.max_y)));
        Ok(Instance::new(catalog, tasks, workers, params, bbox)?)
    }
}

fn parse_doc<T: DeserializeOwned>(text: &str) -> Result<Parsed<T>, IoError> {
    let mut warnings = Vec::new();
    let mut json = serde_json::Deserializer::from_str(text);
    let value: T = {
        let mut on_unknown = |path: serde_ignored::Path| warnings.push(format!("ignored unknown field `{path}`"));
        let tracked = serde_ignored::Deserializer::new(&mut json, &mut on_unknown);
        serde_path_to_error::deserialize(tracked).map_err(|e| IoError::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?
    };
    json.end().map_err(|e| IoError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    Ok(Parsed { value, warnings })
}

pub fn instance_to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from_instance(instance)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<Parsed<Instance>, IoError> {
    let Parsed { value, warnings } = parse_doc::<InstanceDoc>(text)?;
    Ok(Parsed {
        value: value.into_instance()?,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberDoc {
    pub worker: String,
    pub credited: Vec<String>,
    pub extra_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub task: String,
    pub members: Vec<MemberDoc>,
}

/// Matching dump for audit and regression. Revenue fields are informative
/// and ignored when reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingDoc {
    pub schema_version: u32,
    #[serde(default)]
    pub revenue: String,
    #[serde(default)]
    pub revenue_scaled: i64,
    pub pairs: Vec<PairDoc>,
    #[serde(default)]
    pub unassigned: Vec<String>,
}

pub fn matching_to_json(matching: &Matching, instance: &Instance) -> String {
    let cat = instance.catalog();
    let revenue = instance.matching_revenue_unchecked(matching);
    let doc = MatchingDoc {
        schema_version: SCHEMA_VERSION,
        revenue: revenue.format_units(instance.params().money_scale()),
        revenue_scaled: revenue.scaled(),
        pairs: matching
            .pairs()
            .map(|p| PairDoc {
                task: instance.task(p.task).id.clone(),
                members: p
                    .members
                    .iter()
                    .map(|m| MemberDoc {
                        worker: instance.worker(m.worker).id.clone(),
                        credited: cat.names(m.credited),
                        extra_cost: m.extra_cost,
                    })
                    .collect(),
            })
            .collect(),
        unassigned: matching
            .unassigned(instance)
            .into_iter()
            .map(|w| instance.worker(w).id.clone())
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("matching serializes");
    s.push('\n');
    s
}

/// Reads a matching dump against `instance`. Structure is checked here;
/// feasibility is left to the validator.
pub fn matching_from_json(text: &str, instance: &Instance) -> Result<Parsed<Matching>, IoError> {
    let Parsed { value: doc, warnings } = parse_doc::<MatchingDoc>(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(IoError::Version(doc.schema_version));
    }
    let mut matching = Matching::new();
    for (i, p) in doc.pairs.into_iter().enumerate() {
        let task = instance.task_index(&p.task).ok_or(IoError::UnknownReference {
            kind: "task",
            id: p.task.clone(),
        })?;
        let mut members = Vec::with_capacity(p.members.len());
        for (j, m) in p.members.into_iter().enumerate() {
            let worker = instance.worker_index(&m.worker).ok_or(IoError::UnknownReference {
                kind: "worker",
                id: m.worker.clone(),
            })?;
            let credited = instance.catalog().resolve(&m.credited).map_err(|e| IoError::Schema {
                path: format!("pairs[{i}].members[{j}].credited"),
                message: e.to_string(),
            })?;
            members.push(Member {
                worker,
                credited,
                extra_cost: m.extra_cost,
            });
        }
        if matching.insert(PairAssignment { task, members }).is_some() {
            return Err(IoError::Schema {
                path: format!("pairs[{i}].task"),
                message: format!("second pair for task `{}`", p.task),
            });
        }
    }
    Ok(Parsed {
        value: matching,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::canonical_instance;
    use crate::greedy::{solve_greedy, GreedyConfig};

    #[test]
    fn canonical_round_trip() {
        let i0 = canonical_instance();
        let text = instance_to_json(&i0);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back.value, i0);
        assert!(back.warnings.is_empty());
    }

    #[test]
    fn missing_field_is_named() {
        let text = instance_to_json(&canonical_instance()).replacen("\"r\": 5.0,", "", 1);
        let err = instance_from_json(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tasks[0]"), "{msg}");
        assert!(msg.contains("missing field `r`"), "{msg}");
    }

    #[test]
    fn unknown_fields_are_warnings() {
        let text = instance_to_json(&canonical_instance()).replacen("\"r\": 5.0,", "\"r\": 5.0, \"colour\": \"red\",", 1);
        let parsed = instance_from_json(&text).unwrap();
        assert_eq!(parsed.value, canonical_instance());
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("colour"));
    }

    #[test]
    fn rejects_wrong_version_and_unknown_skill() {
        let text = instance_to_json(&canonical_instance()).replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
        assert!(matches!(instance_from_json(&text), Err(IoError::Version(2))));

        let text = instance_to_json(&canonical_instance()).replacen("\"s3\"\n", "\"s9\"\n", 1);
        let err = instance_from_json(&text).unwrap_err();
        assert!(err.to_string().contains("s9"), "{err}");
    }

    #[test]
    fn matching_round_trip() {
        let i0 = canonical_instance();
        let (m, _) = solve_greedy(&i0, &GreedyConfig::default());
        let text = matching_to_json(&m, &i0);
        assert!(text.contains("\"revenue\": \"30\""));
        let back = matching_from_json(&text, &i0).unwrap();
        assert_eq!(back.value, m);
    }

    #[test]
    fn matching_with_unknown_worker() {
        let i0 = canonical_instance();
        let text = r#"{"schema_version": 1, "pairs": [{"task": "t1", "members": [{"worker": "w9", "credited": ["s1"], "extra_cost": 0.0}]}]}"#;
        assert!(matches!(
            matching_from_json(text, &i0),
            Err(IoError::UnknownReference { kind: "worker", .. })
        ));
    }
}
