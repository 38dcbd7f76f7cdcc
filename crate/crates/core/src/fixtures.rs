//! The canonical four-worker, two-task instance used across tests and docs.
//!
//! ```text
//! catalog  s1:10  s2:20  s3:30          alpha = beta = 0.5, scale 1000
//! t1 (0,0)  r=5 b=4 {s1,s2}             t2 (10,0) r=5 b=0 {s3}
//! w1 (3,4) {s1,s2}   w2 (0,7) {s2}   w3 (10,4) {s3}   w4 (0,1) {s1}
//! ```
//!
//! Its optimal revenue is 30 (`t1 <- w1`, `t2 <- w3`).

use crate::model::{Instance, Params, Point, SkillCatalog, SkillSet, Task, Worker};

pub fn canonical_instance() -> Instance {
    let catalog = SkillCatalog::new([("s1", 10.0), ("s2", 20.0), ("s3", 30.0)]).expect("valid catalog");
    let skills = |ids: &[&str]| -> SkillSet { catalog.resolve(ids).expect("known skills") };
    let task = |id: &str, x: f64, r: f64, b: f64, s: &[&str]| Task {
        id: id.to_string(),
        location: Point::new(x, 0.0),
        arrival_time: 0.0,
        fixed_radius: r,
        extra_budget: b,
        required_skills: skills(s),
    };
    let worker = |id: &str, x: f64, y: f64, s: &[&str]| Worker {
        id: id.to_string(),
        location: Point::new(x, y),
        arrival_time: 0.0,
        skills: skills(s),
    };
    let tasks = vec![
        task("t1", 0.0, 5.0, 4.0, &["s1", "s2"]),
        task("t2", 10.0, 5.0, 0.0, &["s3"]),
    ];
    let workers = vec![
        worker("w1", 3.0, 4.0, &["s1", "s2"]),
        worker("w2", 0.0, 7.0, &["s2"]),
        worker("w3", 10.0, 4.0, &["s3"]),
        worker("w4", 0.0, 1.0, &["s1"]),
    ];
    let params = Params::new(0.5, 0.5, 1000).expect("valid params");
    Instance::new(catalog, tasks, workers, params, None).expect("valid instance")
}
