//! Bundling of observed networks with their precomputed features.

use rayon::prelude::*;

use crate::data::Village;
use crate::error::{Error, Result};
use crate::features::{build_features, DyadFeatureSet, FeatureRecipe};
use crate::graph::VillageNetwork;

/// One village's estimation inputs: the observed network and the regressor
/// tensors. Immutable once built; safe to share across workers.
#[derive(Clone, Debug)]
pub struct VillageData {
    pub observed: VillageNetwork,
    pub features: DyadFeatureSet,
}

/// Pairs villages with their networks and builds features, checking that ids
/// and sizes line up and that feature layouts agree across villages.
pub fn assemble(
    villages: &[Village],
    networks: &[VillageNetwork],
    recipe: &FeatureRecipe,
) -> Result<Vec<VillageData>> {
    if villages.len() != networks.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} villages vs {} networks",
            villages.len(),
            networks.len()
        )));
    }
    let data: Vec<VillageData> = villages
        .par_iter()
        .zip(networks.par_iter())
        .map(|(village, net)| {
            if village.village_id != net.village_id() {
                return Err(Error::DimensionMismatch(format!(
                    "village {} paired with network {}",
                    village.village_id,
                    net.village_id()
                )));
            }
            if village.n() != net.n() {
                return Err(Error::DimensionMismatch(format!(
                    "village {} has {} households but its network has {} nodes",
                    village.village_id,
                    village.n(),
                    net.n()
                )));
            }
            Ok(VillageData {
                observed: net.clone(),
                features: build_features(village, recipe)?,
            })
        })
        .collect::<Result<_>>()?;

    if let Some(first) = data.first() {
        for d in &data[1..] {
            if d.features.u_names != first.features.u_names
                || d.features.m_names != first.features.m_names
                || d.features.v_names != first.features.v_names
            {
                return Err(Error::DimensionMismatch(
                    "feature layouts differ across villages".into(),
                ));
            }
        }
    }
    Ok(data)
}
