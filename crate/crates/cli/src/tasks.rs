//! The four benchmark tasks and how their data is obtained.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use quark_core::boolcirc::{edge_detection_model, simplified_ed_model, tiny_mnist_model, toy_model, ModelCircuit};
use quark_core::datasets::{
    gen_edge_detection, gen_simplified_ed, gen_toy, load_mnist, make_tiny_mnist, split, Dataset, MnistSplit,
};

use crate::error::CliError;

/// Training samples drawn for the edge-detection tasks; the rest are the test set.
pub const EDGE_TRAIN_SIZE: usize = 400;

const MNIST_FILES: [&str; 4] =
    ["train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Toy,
    Edge,
    SimplifiedEdge,
    TinyMnist,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Toy, Task::Edge, Task::SimplifiedEdge, Task::TinyMnist];

    pub fn name(self) -> &'static str {
        match self {
            Task::Toy => "toy",
            Task::Edge => "edge",
            Task::SimplifiedEdge => "simplified-edge",
            Task::TinyMnist => "tiny-mnist",
        }
    }

    pub fn model(self) -> ModelCircuit {
        match self {
            Task::Toy => toy_model(),
            Task::Edge => edge_detection_model(),
            Task::SimplifiedEdge => simplified_ed_model(),
            Task::TinyMnist => tiny_mnist_model(),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            CliError::Config(format!("unknown task `{s}` (toy, edge, simplified-edge, tiny-mnist)"))
        })
    }
}

pub struct TaskData {
    pub model: ModelCircuit,
    pub train: Dataset,
    /// Absent for the toy task.
    pub test: Option<Dataset>,
}

/// Builds the model and datasets. Edge tasks split by `seed`; Tiny-MNIST reads
/// the IDX files under `mnist_dir`.
pub fn load_task(task: Task, seed: u64, mnist_dir: &Path) -> Result<TaskData, CliError> {
    let (train, test) = match task {
        Task::Toy => (gen_toy(), None),
        Task::Edge | Task::SimplifiedEdge => {
            let full = if task == Task::Edge { gen_edge_detection() } else { gen_simplified_ed() };
            let (train, test) = split(&full, EDGE_TRAIN_SIZE, seed)?;
            (train, Some(test))
        }
        Task::TinyMnist => {
            if let Some(missing) = MNIST_FILES.iter().find(|f| !mnist_dir.join(f).is_file()) {
                return Err(CliError::Config(format!(
                    "MNIST file {missing} not found in {}; set --mnist-dir or MNIST_DIR",
                    mnist_dir.display()
                )));
            }
            let (images, labels) = load_mnist(mnist_dir, MnistSplit::Train)?;
            let train = make_tiny_mnist(&images, &labels)?;
            let (images, labels) = load_mnist(mnist_dir, MnistSplit::Test)?;
            (train, Some(make_tiny_mnist(&images, &labels)?))
        }
    };
    Ok(TaskData { model: task.model(), train, test })
}
