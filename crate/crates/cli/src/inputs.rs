//! Input resolution and the provenance-labelled echo stored in every report.

use std::path::Path;

use fecarbon::catalog::Catalog;
use fecarbon::data;
use fecarbon::embodied::{DeviceLibrary, EmbodiedModel};
use fecarbon::schema::{
    self, AcceleratorFile, DevicesFile, FabFile, GhgFile, RecipeFile, SchemaFile, WorkloadFile,
};
use fecarbon::system::{AcceleratorConfig, WorkloadProfile};
use serde::{Deserialize, Serialize};

use crate::args::{Command, GlobalArgs};
use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperDefault,
    User,
    Calibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sourced<T> {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub value: T,
}

/// Every parameter file a command consumed, as resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub fab: Sourced<FabFile>,
    pub ghg: Sourced<GhgFile>,
    pub recipe: Sourced<RecipeFile>,
    pub devices: Sourced<DevicesFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Sourced<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accelerator: Option<Sourced<AcceleratorFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload: Option<Sourced<WorkloadFile>>,
}

/// Models built from an [`InputEcho`].
pub struct Resolved {
    pub model: EmbodiedModel,
    pub devices: DeviceLibrary,
    pub catalog: Option<Catalog>,
    pub accelerator: Option<AcceleratorConfig>,
    pub workload: Option<WorkloadProfile>,
}

fn sourced<F: SchemaFile>(
    path: Option<&Path>,
    packaged: impl FnOnce() -> F::Model,
    default: Provenance,
) -> CliResult<Sourced<F>> {
    Ok(match path {
        Some(p) => Sourced {
            provenance: Provenance::User,
            path: Some(p.display().to_string()),
            value: F::from_model(&schema::load::<F>(p)?),
        },
        None => Sourced {
            provenance: default,
            path: None,
            value: F::from_model(&packaged()),
        },
    })
}

fn catalog_echo(
    path: Option<&Path>,
    packaged: impl FnOnce() -> Catalog,
) -> CliResult<Sourced<serde_json::Value>> {
    let (provenance, path, catalog) = match path {
        Some(p) => (Provenance::User, Some(p.display().to_string()), Catalog::load(p)?),
        None => (Provenance::PaperDefault, None, packaged()),
    };
    Ok(Sourced {
        provenance,
        path,
        value: serde_json::from_str(&catalog.to_json_string()?)?,
    })
}

impl InputEcho {
    pub fn load(global: &GlobalArgs, command: &Command) -> CliResult<Self> {
        let mut echo = InputEcho {
            fab: sourced::<FabFile>(global.fab.as_deref(), data::fab, Provenance::PaperDefault)?,
            ghg: sourced::<GhgFile>(global.ghg.as_deref(), data::ghg, Provenance::PaperDefault)?,
            recipe: sourced::<RecipeFile>(global.recipe.as_deref(), data::recipe, Provenance::Calibrated)?,
            devices: sourced::<DevicesFile>(
                global.devices_file.as_deref(),
                data::devices,
                Provenance::PaperDefault,
            )?,
            catalog: None,
            accelerator: None,
            workload: None,
        };
        match command {
            Command::Compare(a) => {
                if let Some(p) = &a.catalog {
                    echo.catalog = Some(catalog_echo(Some(p), Catalog::default)?);
                }
            }
            Command::System(a) => {
                echo.catalog = Some(catalog_echo(a.catalog.as_deref(), data::edge_tpu_design_points)?);
                echo.accelerator = Some(sourced::<AcceleratorFile>(
                    a.accelerator.as_deref(),
                    data::edge_tpu_accelerator,
                    Provenance::PaperDefault,
                )?);
                echo.workload = Some(sourced::<WorkloadFile>(
                    a.workload.as_deref(),
                    data::mobilenet_workload,
                    Provenance::PaperDefault,
                )?);
            }
            _ => {}
        }
        Ok(echo)
    }

    pub fn resolve(&self) -> CliResult<Resolved> {
        let model = EmbodiedModel {
            fab: self.fab.value.clone().into_model()?,
            recipe: self.recipe.value.clone().into_model()?,
            ghg: self.ghg.value.clone().into_model()?,
        };
        let catalog = match &self.catalog {
            Some(c) => Some(Catalog::from_json_str(&c.value.to_string())?),
            None => None,
        };
        Ok(Resolved {
            model,
            devices: self.devices.value.clone().into_model()?,
            catalog,
            accelerator: self
                .accelerator
                .as_ref()
                .map(|a| a.value.clone().into_model())
                .transpose()?,
            workload: self
                .workload
                .as_ref()
                .map(|w| w.value.clone().into_model())
                .transpose()?,
        })
    }
}
