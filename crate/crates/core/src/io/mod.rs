//! Data files, simulation, run configuration and outputs.

mod catalog;
mod config;
mod dataset;
mod run;
mod simulate;

pub use catalog::{catalog, write_catalog, Catalog, CatalogRow};
pub use config::{DataSource, DpmmPrior, EwPriorSpec, GridSettings, Model, RunConfig, Spacing, TwoGroup};
pub use dataset::{
    delta_from_status, load_dataset, read_dataset, save_dataset, write_dataset, DEFAULT_GROUP,
};
pub use run::{group_dir, run, write_grid_csv, RunMode, RunReport, STATUS_MAPPING};
pub use simulate::{simulate, Censoring, SimComponent, SimSpec};
