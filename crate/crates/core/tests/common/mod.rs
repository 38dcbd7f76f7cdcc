#![allow(dead_code)]

use staeb_core::io::{generate_instance, GenConfig};
use staeb_core::model::{BoundingBox, Point};
use staeb_core::Instance;

/// Dozens of tasks and workers in a few square kilometres.
pub fn desk_instance(seed: u64) -> Instance {
    generate_instance(&GenConfig {
        num_tasks: 16,
        num_workers: 48,
        bounding_box: BoundingBox::new(Point::new(0.0, 0.0), Point::new(6000.0, 6000.0)),
        seed,
        ..GenConfig::default()
    })
    .unwrap()
}

/// Within the exact solver's limits: at most 4 tasks, 8 workers, 5 skills.
pub fn tiny_instance(seed: u64) -> Instance {
    let tasks = 1 + (seed % 4) as usize;
    let workers = 3 + (seed % 6) as usize;
    let skills = 2 + (seed % 4) as usize;
    generate_instance(&GenConfig {
        num_tasks: tasks,
        num_workers: workers,
        num_skills: skills,
        skills_per_task: (1, 3),
        skills_per_worker: (1, 2),
        fixed_radius: 600.0,
        budget_range: (0.0, 800.0),
        bounding_box: BoundingBox::new(Point::new(0.0, 0.0), Point::new(2000.0, 2000.0)),
        beta: 0.02,
        seed,
        ..GenConfig::default()
    })
    .unwrap()
}
