//! Packaged default datasets.
//!
//! Fab constants, the GHG model, the calibrated reference ALD recipe and the
//! device table are published values. Design points, the accelerator and the
//! workload summary are illustrative approximations and are flagged as such.

use crate::catalog::Catalog;
use crate::embodied::{DeviceLibrary, EmbodiedModel, FabBaseline};
use crate::recipe::{GhgModel, ProcessRecipe};
use crate::schema::{self, AcceleratorFile, DevicesFile, FabFile, GhgFile, RecipeFile, WorkloadFile};
use crate::system::{AcceleratorConfig, WorkloadProfile};

pub const RECIPE_JSON: &str = include_str!("../data/recipe.json");
pub const GHG_JSON: &str = include_str!("../data/ghg.json");
pub const FAB_JSON: &str = include_str!("../data/fab.json");
pub const DEVICES_JSON: &str = include_str!("../data/devices.json");
pub const DESIGN_POINTS_2MB_CSV: &str = include_str!("../data/design_points_2mb.csv");
pub const EDGE_TPU_DESIGN_POINTS_CSV: &str = include_str!("../data/edge_tpu_design_points.csv");
pub const EDGE_TPU_ACCELERATOR_JSON: &str = include_str!("../data/edge_tpu_accelerator.json");
pub const MOBILENET_WORKLOAD_JSON: &str = include_str!("../data/mobilenet_v1_workload.json");

pub fn recipe() -> ProcessRecipe {
    schema::parse::<RecipeFile>(RECIPE_JSON).expect("packaged recipe is valid")
}

pub fn ghg() -> GhgModel {
    schema::parse::<GhgFile>(GHG_JSON).expect("packaged GHG model is valid")
}

pub fn fab() -> FabBaseline {
    schema::parse::<FabFile>(FAB_JSON).expect("packaged fab baseline is valid")
}

pub fn devices() -> DeviceLibrary {
    schema::parse::<DevicesFile>(DEVICES_JSON).expect("packaged devices are valid")
}

pub fn design_points_2mb() -> Catalog {
    Catalog::parse(DESIGN_POINTS_2MB_CSV).expect("packaged design points are valid")
}

pub fn edge_tpu_design_points() -> Catalog {
    Catalog::parse(EDGE_TPU_DESIGN_POINTS_CSV).expect("packaged design points are valid")
}

pub fn edge_tpu_accelerator() -> AcceleratorConfig {
    schema::parse::<AcceleratorFile>(EDGE_TPU_ACCELERATOR_JSON).expect("packaged accelerator is valid")
}

pub fn mobilenet_workload() -> WorkloadProfile {
    schema::parse::<WorkloadFile>(MOBILENET_WORKLOAD_JSON).expect("packaged workload is valid")
}

/// Fab, recipe and GHG model from the packaged files.
pub fn embodied_model() -> EmbodiedModel {
    EmbodiedModel {
        fab: fab(),
        recipe: recipe(),
        ghg: ghg(),
    }
}
