//! Scene-file harness for the `cloudcover` toolkit: parsing, task execution,
//! report writing and plot data.

pub mod plot;
pub mod report;
pub mod scene;
pub mod tasks;

use std::time::{Duration, Instant};

use report::TaskRecord;
use scene::{Resolved, Scene, TaskKind};
use tasks::{run_task, Overrides};

/// Runs the scene's tasks, or only those of kind `only`. Returns records in
/// scene order together with the wall time of each task.
pub fn run_scene(scene: &Scene, resolved: &Resolved, only: Option<TaskKind>, overrides: Overrides) -> Vec<(TaskRecord, Duration)> {
    scene
        .tasks
        .iter()
        .zip(&resolved.tasks)
        .enumerate()
        .filter(|(_, (decl, _))| only.is_none_or(|k| k == decl.kind))
        .map(|(index, (decl, task))| {
            let start = Instant::now();
            let outcome = run_task(task, overrides);
            (TaskRecord::new(index, decl.kind.as_str(), decl.to_string(), &outcome), start.elapsed())
        })
        .collect()
}
