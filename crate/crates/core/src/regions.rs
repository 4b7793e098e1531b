//! Final regions, choke points, adjacency and the full analysis pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    point_in_polygon, polygon_area, rational_to_f64, seg_dist, split_by_chords_detailed, Location, Point, Polygon,
    Segment,
};
use crate::labeling::label_components;
use crate::map::{apply_obstacle_destruction, MapData, MapError};
use crate::separation::{build_model, zone_polygon, EfopModel, ModelConfig, ModelError, Objective};
use crate::solver::{solve, AttemptStats, BudgetMode, SolverConfig};
use crate::tile::Tile;
use crate::zoning::{classify_all, cluster_zones, split_into_zones, ResourceCluster, Zone, ZoneClassification};

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub objective: Objective,
    pub solver: SolverConfig,
    pub model: ModelConfig,
    pub cluster_threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            objective: Objective::MinSeparationLength,
            solver: SolverConfig::default(),
            model: ModelConfig::default(),
            cluster_threshold: crate::zoning::DEFAULT_CLUSTER_THRESHOLD,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Standard,
    Island,
    UnbuildableChokeArea,
    NoClusterException,
    /// A zone that needed splitting but could not be split.
    Unsplit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: u32,
    pub kind: RegionKind,
    pub cluster_id: Option<u32>,
    pub area: f64,
    pub parent_zone: u32,
    pub polygon: Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChokeKind {
    Separation,
    UnbuildableZone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChokeGeometry {
    Segment(Segment),
    Polygon(Polygon),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChokePoint {
    pub id: u32,
    pub kind: ChokeKind,
    pub geometry: ChokeGeometry,
    pub joins: (u32, u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub id: u32,
    pub tile_count: usize,
    pub zones: Vec<u32>,
    pub polygon: Polygon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneInfo {
    pub id: u32,
    pub component: u32,
    pub height_level: u8,
    pub buildable: bool,
    pub tile_count: usize,
    pub classification: ZoneClassification,
    pub clusters: Vec<u32>,
    /// Simplified contour; for solved zones, the enriched polygon that was split.
    pub polygon: Polygon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoneStats {
    pub zone: u32,
    pub clusters: usize,
    pub variables: usize,
    pub required_selected: usize,
    /// `None` for zones that need no solving.
    pub feasible: Option<bool>,
    pub retries: u32,
    pub iterations: u64,
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<Vec<AttemptStats>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub labeling_ms: f64,
    pub zoning_ms: f64,
    pub clustering_ms: f64,
    pub simplify_ms: f64,
    pub solving_ms: f64,
    pub region_build_ms: f64,
    pub total_ms: f64,
    /// Solve time of each zone that needed splitting.
    pub zone_solve_ms: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisStats {
    pub zones: Vec<ZoneStats>,
    pub total_variables: usize,
    pub solved_zones: usize,
    pub total_iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub map: String,
    pub objective: Objective,
    pub seed: u64,
    pub mode: BudgetMode,
    pub width: u32,
    pub height: u32,
    pub components: Vec<ComponentInfo>,
    pub zones: Vec<ZoneInfo>,
    pub clusters: Vec<ResourceCluster>,
    pub regions: Vec<Region>,
    pub choke_points: Vec<ChokePoint>,
    pub adjacency: Vec<(u32, u32)>,
    pub stats: AnalysisStats,
    /// Row-major run-length encoding of tile zone ids as `[zone, run]`, 0 for
    /// unwalkable tiles.
    pub zone_grid: Vec<(u32, u32)>,
    pub warnings: Vec<String>,
}

impl AnalysisResult {
    /// True when every zone that needed splitting was split.
    pub fn fully_feasible(&self) -> bool {
        self.stats.zones.iter().all(|z| z.feasible != Some(false))
    }

    pub fn region(&self, id: u32) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn zone_tiles(&self) -> BTreeMap<u32, Vec<Tile>> {
        let mut out: BTreeMap<u32, Vec<Tile>> = BTreeMap::new();
        let mut i = 0u32;
        for &(z, run) in &self.zone_grid {
            if z != 0 {
                let e = out.entry(z).or_default();
                for j in i..i + run {
                    e.push(Tile::new((j % self.width) as i32, (j / self.width) as i32));
                }
            }
            i += run;
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Map(#[from] MapError),
}

pub fn analyze(map: &MapData, config: &AnalysisConfig) -> AnalysisResult {
    run(map, config, None).0
}

/// [`analyze`] plus per-stage wall times.
pub fn analyze_timed(map: &MapData, config: &AnalysisConfig) -> (AnalysisResult, StageTimings) {
    run(map, config, None)
}

/// Reanalysis after destroying an obstacle. Zones whose tiles and
/// classification are unchanged keep their ids, clusters and regions; the
/// others are rebuilt and solved with fresh ids.
pub fn merge_and_resolve(
    previous: &AnalysisResult,
    map: &MapData,
    obstacle_id: u32,
    config: &AnalysisConfig,
) -> Result<AnalysisResult, AnalysisError> {
    let after = apply_obstacle_destruction(map, obstacle_id)?;
    Ok(run(&after, config, Some(previous)).0)
}

/// A needs-split zone with the model built for it.
pub struct ZoneModel {
    pub zone: Zone,
    pub model: Result<EfopModel, ModelError>,
}

/// Runs the pipeline up to model building and returns the model of every
/// zone that needs splitting.
pub fn build_zone_models(map: &MapData, config: &AnalysisConfig) -> Vec<ZoneModel> {
    let grid = &map.grid;
    let (components, _) = label_components(grid, |t| grid.walkable(t));
    let mut zoning = split_into_zones(grid, &components);
    cluster_zones(&mut zoning, &map.resources, config.cluster_threshold);
    let classes = classify_all(&zoning);
    zoning
        .zones
        .into_iter()
        .zip(classes)
        .filter(|(_, c)| *c == ZoneClassification::NeedsSplit)
        .map(|(zone, _)| {
            let model = build_model(&zone, map, config.objective, config.model);
            ZoneModel { zone, model }
        })
        .collect()
}

/// Region graph: choke joins plus tile-level contact between regions.
pub fn region_adjacency(choke_points: &[ChokePoint], tile_regions: &[u32], width: u32) -> Vec<(u32, u32)> {
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for c in choke_points {
        let (a, b) = c.joins;
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let w = width as usize;
    for (i, &r) in tile_regions.iter().enumerate() {
        if r == 0 {
            continue;
        }
        let right = if (i + 1) % w != 0 { tile_regions.get(i + 1) } else { None };
        for &o in right.into_iter().chain(tile_regions.get(i + w)) {
            if o != 0 && o != r {
                edges.insert((r.min(o), r.max(o)));
            }
        }
    }
    edges.into_iter().collect()
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct ZoneOutput {
    info: ZoneInfo,
    regions: Vec<Region>,
    separations: Vec<(Segment, (u32, u32))>,
    stats: ZoneStats,
    /// Region per zone tile, parallel to the zone's tile list.
    tile_regions: Vec<u32>,
}

fn run(map: &MapData, config: &AnalysisConfig, previous: Option<&AnalysisResult>) -> (AnalysisResult, StageTimings) {
    let wall = config.solver.mode == BudgetMode::WallClock;
    let mut timings = StageTimings::default();
    let total = Instant::now();
    let grid = &map.grid;
    let mut warnings = Vec::new();

    let t = Instant::now();
    let (components_grid, components) = label_components(grid, |t| grid.walkable(t));
    timings.labeling_ms = ms(t);

    let t = Instant::now();
    let mut zoning = split_into_zones(grid, &components_grid);
    timings.zoning_ms = ms(t);

    let t = Instant::now();
    for r in cluster_zones(&mut zoning, &map.resources, config.cluster_threshold) {
        warnings.push(format!("resource at {} is not on buildable ground and was ignored", r.position));
    }
    let classes = classify_all(&zoning);
    timings.clustering_ms = ms(t);

    // Final zone ids: reuse the previous id of any zone whose tiles and
    // classification are unchanged.
    let mut reuse: Vec<Option<u32>> = vec![None; zoning.zones.len()];
    let mut final_id: Vec<u32> = zoning.zones.iter().map(|z| z.id).collect();
    if let Some(prev) = previous {
        let old_tiles: HashMap<Vec<Tile>, u32> = prev.zone_tiles().into_iter().map(|(z, t)| (t, z)).collect();
        let old_class: HashMap<u32, ZoneClassification> = prev.zones.iter().map(|z| (z.id, z.classification)).collect();
        let mut next_zone = prev.zones.iter().map(|z| z.id).max().unwrap_or(0) + 1;
        let mut next_cluster = prev.clusters.iter().map(|c| c.id).max().unwrap_or(0) + 1;
        for (i, zone) in zoning.zones.iter_mut().enumerate() {
            match old_tiles.get(&zone.tiles) {
                Some(&old) if old_class.get(&old) == Some(&classes[i]) => {
                    reuse[i] = Some(old);
                    final_id[i] = old;
                    zone.clusters = prev.clusters.iter().filter(|c| c.zone == old).cloned().collect();
                }
                _ => {
                    final_id[i] = next_zone;
                    next_zone += 1;
                    for c in &mut zone.clusters {
                        c.id = next_cluster;
                        next_cluster += 1;
                    }
                }
            }
        }
        for (i, zone) in zoning.zones.iter_mut().enumerate() {
            zone.id = final_id[i];
            for c in &mut zone.clusters {
                c.zone = final_id[i];
            }
        }
    }

    let mut next_region = previous.map_or(0, |p| p.regions.iter().map(|r| r.id).max().unwrap_or(0)) + 1;
    let mut outputs: Vec<ZoneOutput> = Vec::with_capacity(zoning.zones.len());
    for (i, zone) in zoning.zones.iter().enumerate() {
        let component = components_grid.label(zone.tiles[0]);
        if let (Some(old), Some(prev)) = (reuse[i], previous) {
            outputs.push(reused_zone(prev, old, zone, component));
            continue;
        }
        let out = build_zone(map, config, zone, component, classes[i], &mut next_region, &mut timings, &mut warnings);
        outputs.push(out);
    }
    outputs.sort_by_key(|o| o.info.id);

    let mut tile_regions = vec![0u32; grid.len()];
    for (i, zone) in zoning.zones.iter().enumerate() {
        let out = outputs.iter().find(|o| o.info.id == final_id[i]).expect("every zone has output");
        for (t, &r) in zone.tiles.iter().zip(&out.tile_regions) {
            tile_regions[grid.index(*t)] = r;
        }
    }
    let mut choke_points = Vec::new();
    for out in &outputs {
        for (seg, joins) in &out.separations {
            choke_points.push(ChokePoint {
                id: choke_points.len() as u32 + 1,
                kind: ChokeKind::Separation,
                geometry: ChokeGeometry::Segment(*seg),
                joins: *joins,
            });
        }
    }
    for (i, zone) in zoning.zones.iter().enumerate() {
        if zone.buildable {
            continue;
        }
        let out = outputs.iter().find(|o| o.info.id == final_id[i]).expect("every zone has output");
        let own = out.regions[0].id;
        let mut around = BTreeSet::new();
        for t in &zone.tiles {
            for n in t.neighbors4() {
                if grid.in_bounds(n) {
                    let r = tile_regions[grid.index(n)];
                    if r != 0 && !out.regions.iter().any(|x| x.id == r) {
                        around.insert(r);
                    }
                }
            }
        }
        let around: Vec<u32> = around.into_iter().collect();
        let mut pairs = Vec::new();
        if around.len() == 1 {
            pairs.push((own.min(around[0]), own.max(around[0])));
        }
        for a in 0..around.len() {
            for b in a + 1..around.len() {
                pairs.push((around[a], around[b]));
            }
        }
        for joins in pairs {
            choke_points.push(ChokePoint {
                id: choke_points.len() as u32 + 1,
                kind: ChokeKind::UnbuildableZone,
                geometry: ChokeGeometry::Polygon(out.regions[0].polygon.clone()),
                joins,
            });
        }
    }
    let adjacency = region_adjacency(&choke_points, &tile_regions, grid.width());

    let mut zone_of_tile = vec![0u32; grid.len()];
    for (i, zone) in zoning.zones.iter().enumerate() {
        for t in &zone.tiles {
            zone_of_tile[grid.index(*t)] = final_id[i];
        }
    }
    let mut zone_grid: Vec<(u32, u32)> = Vec::new();
    for z in zone_of_tile {
        match zone_grid.last_mut() {
            Some((last, run)) if *last == z => *run += 1,
            _ => zone_grid.push((z, 1)),
        }
    }
    let mut components_out: Vec<ComponentInfo> = components
        .iter()
        .map(|c| ComponentInfo { id: c.id, tile_count: c.tile_count, zones: Vec::new(), polygon: c.polygon() })
        .collect();
    for out in &outputs {
        components_out[out.info.component as usize - 1].zones.push(out.info.id);
    }
    let mut clusters: Vec<ResourceCluster> = zoning.zones.iter().flat_map(|z| z.clusters.clone()).collect();
    clusters.sort_by_key(|c| c.id);
    // Region building absorbs the bookkeeping between stages so the stage
    // times add up to the total.
    timings.total_ms = ms(total);
    timings.region_build_ms = (timings.total_ms
        - timings.labeling_ms
        - timings.zoning_ms
        - timings.clustering_ms
        - timings.simplify_ms
        - timings.solving_ms)
        .max(0.0);

    let mut zones = Vec::new();
    let mut regions = Vec::new();
    let mut zone_stats = Vec::new();
    for out in outputs {
        zones.push(out.info);
        regions.extend(out.regions);
        zone_stats.push(out.stats);
    }
    regions.sort_by_key(|r| r.id);
    let stats = AnalysisStats {
        total_variables: zone_stats.iter().map(|z| z.variables).sum(),
        solved_zones: zone_stats.iter().filter(|z| z.feasible.is_some()).count(),
        total_iterations: zone_stats.iter().map(|z| z.iterations).sum(),
        zones: zone_stats,
        timings: wall.then(|| timings.clone()),
    };
    let result = AnalysisResult {
        map: map.name.clone(),
        objective: config.objective,
        seed: config.solver.seed,
        mode: config.solver.mode,
        width: grid.width(),
        height: grid.height(),
        components: components_out,
        zones,
        clusters,
        regions,
        choke_points,
        adjacency,
        stats,
        zone_grid,
        warnings,
    };
    (result, timings)
}

fn reused_zone(prev: &AnalysisResult, old: u32, zone: &Zone, component: u32) -> ZoneOutput {
    let info = prev.zones.iter().find(|z| z.id == old).expect("reused zone exists").clone();
    let regions: Vec<Region> = prev.regions.iter().filter(|r| r.parent_zone == old).cloned().collect();
    let ids: BTreeSet<u32> = regions.iter().map(|r| r.id).collect();
    let separations = prev
        .choke_points
        .iter()
        .filter(|c| c.kind == ChokeKind::Separation && ids.contains(&c.joins.0) && ids.contains(&c.joins.1))
        .filter_map(|c| match &c.geometry {
            ChokeGeometry::Segment(s) => Some((*s, c.joins)),
            ChokeGeometry::Polygon(_) => None,
        })
        .collect();
    let stats = prev.stats.zones.iter().find(|s| s.zone == old).expect("reused zone has stats").clone();
    let tile_regions = assign_tiles(&zone.tiles, &regions);
    ZoneOutput { info: ZoneInfo { component, ..info }, regions, separations, stats, tile_regions }
}

/// Region of each tile: the region containing its center, else the nearest.
fn assign_tiles(tiles: &[Tile], regions: &[Region]) -> Vec<u32> {
    if regions.len() == 1 {
        return vec![regions[0].id; tiles.len()];
    }
    tiles
        .iter()
        .map(|t| {
            let c = Point::tile_center(t.x as i64, t.y as i64);
            if let Some(r) = regions.iter().find(|r| point_in_polygon(c, &r.polygon) != Location::Outside) {
                return r.id;
            }
            let p = (c.xf(), c.yf());
            regions
                .iter()
                .map(|r| {
                    let d = r
                        .polygon
                        .edges()
                        .map(|e| seg_dist(p, (e.a.xf(), e.a.yf()), (e.b.xf(), e.b.yf())))
                        .fold(f64::INFINITY, f64::min);
                    (d, r.id)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, id)| id)
                .expect("zone has regions")
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn build_zone(
    map: &MapData,
    config: &AnalysisConfig,
    zone: &Zone,
    component: u32,
    class: ZoneClassification,
    next_region: &mut u32,
    timings: &mut StageTimings,
    warnings: &mut Vec<String>,
) -> ZoneOutput {
    let wall = config.solver.mode == BudgetMode::WallClock;
    let t = Instant::now();
    let (simplified, _) =
        zone_polygon(zone, config.model.epsilon).unwrap_or_else(|_| (zone.contour.clone(), Vec::new()));
    timings.simplify_ms += ms(t);
    let cluster_ids: Vec<u32> = zone.clusters.iter().map(|c| c.id).collect();
    let mut stats = ZoneStats {
        zone: zone.id,
        clusters: zone.clusters.len(),
        variables: 0,
        required_selected: 0,
        feasible: None,
        retries: 0,
        iterations: 0,
        objective: None,
        wall_time_ms: None,
        attempts: None,
    };
    let mut info = ZoneInfo {
        id: zone.id,
        component,
        height_level: zone.height_level,
        buildable: zone.buildable,
        tile_count: zone.tiles.len(),
        classification: class,
        clusters: cluster_ids.clone(),
        polygon: simplified.clone(),
    };
    let mut new_region = |kind, cluster_id, polygon: Polygon| {
        let id = *next_region;
        *next_region += 1;
        Region { id, kind, cluster_id, area: rational_to_f64(&polygon_area(&polygon)), parent_zone: zone.id, polygon }
    };
    let single = |kind| (kind, cluster_ids.first().copied());
    let (kind, cluster) = match class {
        ZoneClassification::NeedsSplit => {
            let t = Instant::now();
            let solved =
                build_model(zone, map, config.objective, config.model).map_err(|e| e.to_string()).and_then(|model| {
                    let sol = solve(&model, &config.solver).map_err(|e| e.to_string())?;
                    Ok((model, sol))
                });
            timings.solving_ms += ms(t);
            timings.zone_solve_ms.push((zone.id, ms(t)));
            match solved {
                Ok((model, sol)) => {
                    stats.variables = model.candidates.len();
                    stats.required_selected = model.required_selected;
                    stats.feasible = Some(sol.feasible);
                    stats.retries = sol.retries_used;
                    stats.iterations = sol.iterations;
                    stats.objective = Some(sol.objective_value);
                    if wall {
                        stats.wall_time_ms = Some(sol.wall_time_ms);
                        stats.attempts = Some(sol.attempts.clone());
                    }
                    if sol.feasible {
                        let chords: Vec<Segment> =
                            sol.assignment.iter().map(|&i| model.candidates[i].segment()).collect();
                        let split = split_by_chords_detailed(&model.polygon, &chords)
                            .expect("feasible selections split the zone cleanly");
                        let face_cluster: Vec<Option<u32>> = split
                            .faces
                            .iter()
                            .map(|f| {
                                model
                                    .anchors
                                    .iter()
                                    .position(|&a| point_in_polygon(a, f) == Location::Inside)
                                    .map(|k| model.cluster_ids[k])
                            })
                            .collect();
                        let regions: Vec<Region> = split
                            .faces
                            .into_iter()
                            .zip(face_cluster)
                            .map(|(f, c)| new_region(RegionKind::Standard, c, f))
                            .collect();
                        let separations = chords
                            .iter()
                            .zip(&split.chord_sides)
                            .map(|(s, &(l, r))| {
                                let (a, b) = (regions[l].id, regions[r].id);
                                (*s, (a.min(b), a.max(b)))
                            })
                            .collect();
                        info.polygon = model.polygon.clone();
                        let tile_regions = assign_tiles(&zone.tiles, &regions);
                        return ZoneOutput { info, regions, separations, stats, tile_regions };
                    }
                    warnings.push(format!(
                        "zone {}: no feasible separation found after {} retries (error {}); left unsplit",
                        zone.id, sol.retries_used, sol.constraint_error
                    ));
                }
                Err(e) => {
                    stats.feasible = Some(false);
                    warnings.push(format!("zone {}: {e}; left unsplit", zone.id));
                }
            }
            (RegionKind::Unsplit, None)
        }
        ZoneClassification::SingleCluster => single(RegionKind::Standard),
        ZoneClassification::Unbuildable => single(RegionKind::UnbuildableChokeArea),
        ZoneClassification::ExceptionIsland => single(RegionKind::Island),
        ZoneClassification::ExceptionUnbuildableSurround | ZoneClassification::ExceptionNoCluster => {
            single(RegionKind::NoClusterException)
        }
    };
    let region = new_region(kind, cluster, simplified);
    let tile_regions = vec![region.id; zone.tiles.len()];
    ZoneOutput { info, regions: vec![region], separations: Vec::new(), stats, tile_regions }
}
