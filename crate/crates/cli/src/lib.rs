//! Document format, pipelines and reports behind the `cartan` command-line tool.

pub mod document;
pub mod error;
pub mod geometry;
pub mod pipelines;
pub mod report;

use cartan_core::symcore::Sampling;

pub use document::{parse_document, GeometrySpec, Pipeline};
pub use error::InputError;
pub use pipelines::{HolonomyArgs, RunOptions};
pub use report::{CheckReport, Outcome, Report};

#[derive(Clone, Debug)]
pub enum Command {
    Validate,
    /// `None` runs the document's own run list.
    Check(Option<Pipeline>),
    Holonomy(HolonomyArgs),
    Identities,
}

impl Command {
    fn label(&self) -> String {
        match self {
            Command::Validate => "validate".into(),
            Command::Check(Some(p)) => format!("check --pipeline {}", p.as_str()),
            Command::Check(None) => "check".into(),
            Command::Holonomy(_) => "holonomy".into(),
            Command::Identities => "identities".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    /// Overrides the document seed.
    pub seed: Option<u64>,
    pub samples: usize,
    pub tol: f64,
    pub timings: bool,
    pub forms: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: None, samples: 32, tol: 1e-9, timings: false, forms: 10 }
    }
}

/// Parse, build and run one command on a document.
pub fn run(command: &Command, text: &str, settings: &Settings) -> Report {
    let spec = match parse_document(text) {
        Ok(s) => s,
        Err(e) => {
            let seed = settings.seed.unwrap_or(0);
            return Report::new(command.label(), seed, settings.samples, settings.tol).finish(Err(e));
        }
    };
    let seed = settings.seed.or(spec.seed).unwrap_or(0);
    let mut report = Report::new(command.label(), seed, settings.samples, settings.tol);
    report.document = spec.name.clone();
    let sampling = Sampling { seed, samples: settings.samples, eps_abs: settings.tol, eps_rel: settings.tol };
    let opts = RunOptions { seed, timings: settings.timings, forms: settings.forms };
    let result = geometry::build(&spec, sampling).and_then(|geo| match command {
        Command::Validate => pipelines::validate(&geo, &opts),
        Command::Check(p) => {
            let list = match p {
                Some(p) => vec![*p],
                None if spec.run.is_empty() => {
                    return Err(InputError::new("/run", "no pipeline given and the document has no run list"))
                }
                None => spec.run.clone(),
            };
            let mut out = Vec::new();
            for p in list {
                out.extend(pipelines::check(&geo, p, &opts)?);
            }
            Ok(out)
        }
        Command::Holonomy(args) => pipelines::holonomy(&geo, args, &opts),
        Command::Identities => pipelines::identities(&geo, &opts),
    });
    report.finish(result)
}
