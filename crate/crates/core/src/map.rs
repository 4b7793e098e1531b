//! Portable map representation: tile grid, resources, destructible obstacles
//! and start locations, loaded from JSON or a hand-authorable ASCII format.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tile::Tile;

pub const DEFAULT_MINERAL_AMOUNT: u32 = 1500;
pub const DEFAULT_GAS_AMOUNT: u32 = 2500;
pub const DEFAULT_OBSTACLE_HIT_POINTS: u32 = 2000;
pub const MAX_HEIGHT_LEVEL: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid map at tile {tile}: {reason}")]
    InvalidTile { tile: Tile, reason: String },
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error("unknown obstacle id {0}")]
    UnknownObstacle(u32),
    #[error("map cannot be written as ASCII: {0}")]
    Unrepresentable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapFormat {
    Json,
    Ascii,
}

impl MapFormat {
    /// `.json` files are JSON, everything else is read as ASCII.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => MapFormat::Json,
            _ => MapFormat::Ascii,
        }
    }
}

/// Per-tile walkability, buildability and height level, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileGrid {
    width: u32,
    height: u32,
    walkable: Vec<bool>,
    buildable: Vec<bool>,
    height_level: Vec<u8>,
}

impl TileGrid {
    /// An all-unwalkable grid.
    pub fn new(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        TileGrid { width, height, walkable: vec![false; n], buildable: vec![false; n], height_level: vec![0; n] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.walkable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walkable.is_empty()
    }

    pub fn in_bounds(&self, t: Tile) -> bool {
        t.x >= 0 && t.y >= 0 && (t.x as u32) < self.width && (t.y as u32) < self.height
    }

    pub fn index(&self, t: Tile) -> usize {
        debug_assert!(self.in_bounds(t));
        t.y as usize * self.width as usize + t.x as usize
    }

    pub fn tile_at(&self, index: usize) -> Tile {
        Tile::new((index % self.width as usize) as i32, (index / self.width as usize) as i32)
    }

    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        (0..self.len()).map(|i| self.tile_at(i))
    }

    /// Out-of-bounds tiles are unwalkable.
    pub fn walkable(&self, t: Tile) -> bool {
        self.in_bounds(t) && self.walkable[self.index(t)]
    }

    pub fn buildable(&self, t: Tile) -> bool {
        self.in_bounds(t) && self.buildable[self.index(t)]
    }

    pub fn height_level(&self, t: Tile) -> u8 {
        if self.in_bounds(t) {
            self.height_level[self.index(t)]
        } else {
            0
        }
    }

    pub fn set(&mut self, t: Tile, walkable: bool, buildable: bool, height_level: u8) {
        let i = self.index(t);
        self.walkable[i] = walkable;
        self.buildable[i] = buildable;
        self.height_level[i] = height_level;
    }

    pub fn walkable_count(&self) -> usize {
        self.walkable.iter().filter(|&&w| w).count()
    }

    pub fn validate(&self) -> Result<(), MapError> {
        if self.width == 0 || self.height == 0 {
            return Err(MapError::Invalid("width and height must be positive".into()));
        }
        for i in 0..self.len() {
            let t = self.tile_at(i);
            if self.buildable[i] && !self.walkable[i] {
                return Err(MapError::InvalidTile { tile: t, reason: "buildable but not walkable".into() });
            }
            if self.height_level[i] > MAX_HEIGHT_LEVEL {
                return Err(MapError::InvalidTile {
                    tile: t,
                    reason: format!("height level {} out of range 0..=3", self.height_level[i]),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    Mineral,
    Gas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub kind: ResourceKind,
    pub position: Tile,
    pub amount: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestructibleObstacle {
    pub id: u32,
    pub tiles: Vec<Tile>,
    pub hit_points: u32,
    /// Buildability of the footprint once the obstacle is destroyed.
    pub buildable_after: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapData {
    pub name: String,
    pub grid: TileGrid,
    pub resources: Vec<Resource>,
    pub obstacles: Vec<DestructibleObstacle>,
    pub start_locations: Vec<Tile>,
}

impl MapData {
    pub fn validate(&self) -> Result<(), MapError> {
        self.grid.validate()?;
        let mut occupied = HashSet::new();
        for r in &self.resources {
            if !self.grid.in_bounds(r.position) {
                return Err(MapError::InvalidTile { tile: r.position, reason: "resource out of bounds".into() });
            }
            if !occupied.insert(r.position) {
                return Err(MapError::InvalidTile {
                    tile: r.position,
                    reason: "more than one resource on tile".into(),
                });
            }
        }
        let mut ids = HashSet::new();
        for o in &self.obstacles {
            if !ids.insert(o.id) {
                return Err(MapError::Invalid(format!("duplicate obstacle id {}", o.id)));
            }
            if o.tiles.is_empty() {
                return Err(MapError::Invalid(format!("obstacle {} has an empty footprint", o.id)));
            }
            if o.hit_points == 0 {
                return Err(MapError::Invalid(format!("obstacle {} has no hit points", o.id)));
            }
            for &t in &o.tiles {
                if !self.grid.in_bounds(t) {
                    return Err(MapError::InvalidTile { tile: t, reason: format!("obstacle {} out of bounds", o.id) });
                }
                if self.grid.walkable(t) {
                    return Err(MapError::InvalidTile {
                        tile: t,
                        reason: format!("obstacle {} footprint must be unwalkable", o.id),
                    });
                }
                if occupied.contains(&t) {
                    return Err(MapError::InvalidTile { tile: t, reason: "resource inside obstacle footprint".into() });
                }
            }
        }
        for &s in &self.start_locations {
            if !self.grid.buildable(s) {
                return Err(MapError::InvalidTile { tile: s, reason: "start location not on buildable tile".into() });
            }
        }
        Ok(())
    }

    pub fn obstacle(&self, id: u32) -> Option<&DestructibleObstacle> {
        self.obstacles.iter().find(|o| o.id == id)
    }

    pub fn resource_at(&self, t: Tile) -> Option<&Resource> {
        self.resources.iter().find(|r| r.position == t)
    }
}

pub fn load_map(bytes: &[u8], format: MapFormat) -> Result<MapData, MapError> {
    let map = match format {
        MapFormat::Json => parse_json(bytes)?,
        MapFormat::Ascii => parse_ascii(bytes)?,
    };
    map.validate()?;
    Ok(map)
}

pub fn save_map(map: &MapData, format: MapFormat) -> Result<String, MapError> {
    match format {
        MapFormat::Json => Ok(to_json(map)),
        MapFormat::Ascii => to_ascii(map),
    }
}

/// Removes an obstacle, opening its footprint as walkable ground at its
/// recorded height with the obstacle's after-destruction buildability.
pub fn apply_obstacle_destruction(map: &MapData, obstacle_id: u32) -> Result<MapData, MapError> {
    let obstacle = map.obstacle(obstacle_id).ok_or(MapError::UnknownObstacle(obstacle_id))?;
    let mut out = map.clone();
    for &t in &obstacle.tiles {
        let h = out.grid.height_level(t);
        out.grid.set(t, true, obstacle.buildable_after, h);
    }
    out.obstacles.retain(|o| o.id != obstacle_id);
    Ok(out)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Serialize, Deserialize)]
struct JsonMap {
    name: String,
    width: u32,
    height: u32,
    walkable: Vec<u8>,
    buildable: Vec<u8>,
    height_level: Vec<u8>,
    #[serde(default)]
    resources: Vec<JsonResource>,
    #[serde(default)]
    obstacles: Vec<JsonObstacle>,
    #[serde(default)]
    start_locations: Vec<JsonXY>,
}

#[derive(Serialize, Deserialize)]
struct JsonResource {
    kind: ResourceKind,
    x: i32,
    y: i32,
    amount: u32,
}

#[derive(Serialize, Deserialize)]
struct JsonObstacle {
    id: u32,
    tiles: Vec<JsonXY>,
    hit_points: u32,
    #[serde(default)]
    buildable_after: bool,
}

#[derive(Serialize, Deserialize)]
struct JsonXY {
    x: i32,
    y: i32,
}

fn parse_json(bytes: &[u8]) -> Result<MapData, MapError> {
    let j: JsonMap = serde_json::from_slice(bytes).map_err(|e| MapError::Parse(e.to_string()))?;
    let n = j.width as usize * j.height as usize;
    for (key, len) in
        [("walkable", j.walkable.len()), ("buildable", j.buildable.len()), ("height_level", j.height_level.len())]
    {
        if len != n {
            return Err(MapError::Invalid(format!("`{key}` has {len} entries, expected {n}")));
        }
    }
    let flag = |key: &str, v: u8, i: usize| -> Result<bool, MapError> {
        match v {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(MapError::Parse(format!("`{key}`[{i}] must be 0 or 1"))),
        }
    };
    let mut grid = TileGrid::new(j.width, j.height);
    for i in 0..n {
        grid.walkable[i] = flag("walkable", j.walkable[i], i)?;
        grid.buildable[i] = flag("buildable", j.buildable[i], i)?;
        grid.height_level[i] = j.height_level[i];
    }
    Ok(MapData {
        name: j.name,
        grid,
        resources: j
            .resources
            .into_iter()
            .map(|r| Resource { kind: r.kind, position: Tile::new(r.x, r.y), amount: r.amount })
            .collect(),
        obstacles: j
            .obstacles
            .into_iter()
            .map(|o| DestructibleObstacle {
                id: o.id,
                tiles: o.tiles.into_iter().map(|t| Tile::new(t.x, t.y)).collect(),
                hit_points: o.hit_points,
                buildable_after: o.buildable_after,
            })
            .collect(),
        start_locations: j.start_locations.into_iter().map(|t| Tile::new(t.x, t.y)).collect(),
    })
}

fn to_json(map: &MapData) -> String {
    let g = &map.grid;
    let j = JsonMap {
        name: map.name.clone(),
        width: g.width,
        height: g.height,
        walkable: g.walkable.iter().map(|&b| b as u8).collect(),
        buildable: g.buildable.iter().map(|&b| b as u8).collect(),
        height_level: g.height_level.clone(),
        resources: map
            .resources
            .iter()
            .map(|r| JsonResource { kind: r.kind, x: r.position.x, y: r.position.y, amount: r.amount })
            .collect(),
        obstacles: map
            .obstacles
            .iter()
            .map(|o| JsonObstacle {
                id: o.id,
                tiles: o.tiles.iter().map(|t| JsonXY { x: t.x, y: t.y }).collect(),
                hit_points: o.hit_points,
                buildable_after: o.buildable_after,
            })
            .collect(),
        start_locations: map.start_locations.iter().map(|t| JsonXY { x: t.x, y: t.y }).collect(),
    };
    serde_json::to_string_pretty(&j).expect("map serializes")
}

// ---------------------------------------------------------------------------
// ASCII

fn parse_ascii(bytes: &[u8]) -> Result<MapData, MapError> {
    let text = std::str::from_utf8(bytes).map_err(|e| MapError::Parse(e.to_string()))?;
    let mut rows: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while rows.last().is_some_and(|r| r.is_empty()) {
        rows.pop();
    }
    if rows.is_empty() {
        return Err(MapError::Parse("empty map".into()));
    }
    let width = rows[0].chars().count();
    if let Some((y, r)) = rows.iter().enumerate().find(|(_, r)| r.chars().count() != width) {
        return Err(MapError::Parse(format!("row {y} has {} tiles, expected {width}", r.chars().count())));
    }
    let mut grid = TileGrid::new(width as u32, rows.len() as u32);
    let mut resources = Vec::new();
    let mut starts = Vec::new();
    let mut obstacle_tiles = Vec::new();
    for (y, row) in rows.iter().enumerate() {
        for (x, c) in row.chars().enumerate() {
            let t = Tile::new(x as i32, y as i32);
            match c {
                '#' => {}
                '.' => grid.set(t, true, true, 0),
                ':' => grid.set(t, true, true, 1),
                ';' => grid.set(t, true, true, 2),
                '^' => grid.set(t, true, true, 3),
                ',' | '/' => grid.set(t, true, false, 0),
                'm' => {
                    grid.set(t, true, true, 0);
                    resources.push(Resource {
                        kind: ResourceKind::Mineral,
                        position: t,
                        amount: DEFAULT_MINERAL_AMOUNT,
                    });
                }
                'g' => {
                    grid.set(t, true, true, 0);
                    resources.push(Resource { kind: ResourceKind::Gas, position: t, amount: DEFAULT_GAS_AMOUNT });
                }
                'S' => {
                    grid.set(t, true, true, 0);
                    starts.push(t);
                }
                'D' => obstacle_tiles.push(t),
                other => return Err(MapError::Parse(format!("unknown tile character {other:?} at {t}"))),
            }
        }
    }
    Ok(MapData {
        name: String::new(),
        obstacles: group_obstacles(&obstacle_tiles),
        grid,
        resources,
        start_locations: starts,
    })
}

/// One obstacle per 4-connected run of `D` tiles, numbered from 1 in raster
/// order of each run's first tile.
fn group_obstacles(tiles: &[Tile]) -> Vec<DestructibleObstacle> {
    let set: HashSet<Tile> = tiles.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &start in tiles {
        if !seen.insert(start) {
            continue;
        }
        let mut run = vec![start];
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for n in t.neighbors4() {
                if set.contains(&n) && seen.insert(n) {
                    run.push(n);
                    stack.push(n);
                }
            }
        }
        run.sort_by_key(|t| (t.y, t.x));
        out.push(DestructibleObstacle {
            id: out.len() as u32 + 1,
            tiles: run,
            hit_points: DEFAULT_OBSTACLE_HIT_POINTS,
            buildable_after: false,
        });
    }
    out
}

fn to_ascii(map: &MapData) -> Result<String, MapError> {
    let g = &map.grid;
    let mut chars: BTreeMap<Tile, char> = BTreeMap::new();
    for o in &map.obstacles {
        for &t in &o.tiles {
            chars.insert(t, 'D');
        }
    }
    for r in &map.resources {
        let c = match r.kind {
            ResourceKind::Mineral => 'm',
            ResourceKind::Gas => 'g',
        };
        if chars.insert(r.position, c).is_some() {
            return Err(MapError::Unrepresentable(format!("tile {} carries two features", r.position)));
        }
    }
    for &s in &map.start_locations {
        if chars.insert(s, 'S').is_some() {
            return Err(MapError::Unrepresentable(format!("tile {s} carries two features")));
        }
    }
    let mut out = String::with_capacity(g.len() + g.height as usize);
    for y in 0..g.height as i32 {
        for x in 0..g.width as i32 {
            let t = Tile::new(x, y);
            let c = match chars.get(&t) {
                Some(&c) => c,
                None => match (g.walkable(t), g.buildable(t), g.height_level(t)) {
                    (false, _, _) => '#',
                    (true, true, 0) => '.',
                    (true, true, 1) => ':',
                    (true, true, 2) => ';',
                    (true, true, _) => '^',
                    (true, false, _) => ',',
                },
            };
            out.push(c);
        }
        out.push('\n');
    }
    // Anything the character set cannot carry (amounts, heights under
    // features, obstacle grouping, ...) shows up as a mismatch on reload.
    let mut back = parse_ascii(out.as_bytes())?;
    back.name = map.name.clone();
    if &back != map {
        return Err(MapError::Unrepresentable(
            "map uses amounts, heights or obstacle data outside the ASCII alphabet".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ascii_map() {
        let m = load_map(b"....\n....\n....\n....\n", MapFormat::Ascii).unwrap();
        assert_eq!(m.grid.width(), 4);
        assert_eq!(m.grid.walkable_count(), 16);
        assert!(m.grid.tiles().all(|t| m.grid.buildable(t) && m.grid.height_level(t) == 0));
    }

    #[test]
    fn mineral_gets_default_amount() {
        let m = load_map(b"....\n..m.\n....\n", MapFormat::Ascii).unwrap();
        assert_eq!(
            m.resources,
            vec![Resource { kind: ResourceKind::Mineral, position: Tile::new(2, 1), amount: 1500 }]
        );
    }

    #[test]
    fn buildable_unwalkable_is_rejected() {
        let json = br#"{"name":"bad","width":2,"height":1,"walkable":[1,0],"buildable":[1,1],
            "height_level":[0,0],"resources":[],"obstacles":[],"start_locations":[]}"#;
        match load_map(json, MapFormat::Json) {
            Err(MapError::InvalidTile { tile, .. }) => assert_eq!(tile, Tile::new(1, 0)),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(load_map(b"..\n...\n", MapFormat::Ascii), Err(MapError::Parse(_))));
        assert!(matches!(load_map(b"..x\n", MapFormat::Ascii), Err(MapError::Parse(_))));
        assert!(matches!(load_map(b"{", MapFormat::Json), Err(MapError::Parse(_))));
    }

    #[test]
    fn obstacles_group_by_runs() {
        let m = load_map(b"..D..\n..D..\nDD...\n", MapFormat::Ascii).unwrap();
        assert_eq!(m.obstacles.len(), 2);
        assert_eq!(m.obstacles[0].tiles, vec![Tile::new(2, 0), Tile::new(2, 1)]);
        assert_eq!(m.obstacles[1].id, 2);
    }

    #[test]
    fn destroy_obstacle() {
        let m = load_map(b"..DD..\n", MapFormat::Ascii).unwrap();
        let d = apply_obstacle_destruction(&m, 1).unwrap();
        assert!(d.obstacles.is_empty());
        assert!(d.grid.walkable(Tile::new(2, 0)) && d.grid.walkable(Tile::new(3, 0)));
        assert!(!d.grid.buildable(Tile::new(2, 0)));
        assert_eq!(apply_obstacle_destruction(&m, 9), Err(MapError::UnknownObstacle(9)));
    }

    #[test]
    fn start_must_be_buildable() {
        let json = br#"{"name":"s","width":2,"height":1,"walkable":[1,1],"buildable":[0,1],
            "height_level":[0,0],"start_locations":[{"x":0,"y":0}]}"#;
        assert!(matches!(load_map(json, MapFormat::Json), Err(MapError::InvalidTile { .. })));
    }

    #[test]
    fn ascii_rejects_unrepresentable() {
        let mut m = load_map(b"..m.\n", MapFormat::Ascii).unwrap();
        m.resources[0].amount = 7;
        assert!(matches!(save_map(&m, MapFormat::Ascii), Err(MapError::Unrepresentable(_))));
    }
}
