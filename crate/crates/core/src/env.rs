//! Deterministic gridworld MDPs with event labeling.
//!
//! Every environment shares the same five actions. Items are either one-shot
//! pickups, renewable sources (depleted until the next conversion at a station
//! that replenishes them), or stations that convert inventory. A successful
//! interaction emits the item's label; everything else emits `none`.
//!
//! Layouts are procedural. The layout seed draws a sequence of normalized
//! anchor points shared by every environment, so the i-th role of two
//! environments built from the same seed sits at the same relative position.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::NONE_SYMBOL;

pub const NUM_ACTIONS: usize = 5;
pub const MAX_RESOURCES: usize = 4;
pub const MAX_ITEMS: usize = 64;
pub const DEFAULT_STATE_BOUND: usize = 2_000_000;

const LAYOUT_SALT: u64 = 0x6c61_6e74_6572_6e31;
const PROBE_SALT: u64 = 0x7072_6f62_6531_3233;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
    #[error("grid {width}x{height} has {cells} cells but needs at least {needed}")]
    TooSmall {
        width: u16,
        height: u16,
        cells: usize,
        needed: usize,
    },
    #[error("state space of {size} states exceeds bound {bound}")]
    StateBoundExceeded { size: u128, bound: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Interact,
}

impl Action {
    pub const ALL: [Action; NUM_ACTIONS] = [
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::Interact,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Action {
        Self::ALL[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: u16,
    pub y: u16,
}

impl Cell {
    pub const fn new(x: u16, y: u16) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvName {
    DungeonQuest,
    BlindCraftsman,
    RescueMission,
    TreasureHunt,
    MiningOperation,
    FarmingOperation,
}

impl EnvName {
    pub const ALL: [EnvName; 6] = [
        EnvName::DungeonQuest,
        EnvName::BlindCraftsman,
        EnvName::RescueMission,
        EnvName::TreasureHunt,
        EnvName::MiningOperation,
        EnvName::FarmingOperation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnvName::DungeonQuest => "dungeon_quest",
            EnvName::BlindCraftsman => "blind_craftsman",
            EnvName::RescueMission => "rescue_mission",
            EnvName::TreasureHunt => "treasure_hunt",
            EnvName::MiningOperation => "mining_operation",
            EnvName::FarmingOperation => "farming_operation",
        }
    }

    /// Grid side length used in the reference experiments.
    pub fn default_size(self) -> u16 {
        match self {
            EnvName::DungeonQuest => 20,
            EnvName::BlindCraftsman => 25,
            EnvName::RescueMission => 5,
            EnvName::TreasureHunt => 6,
            EnvName::MiningOperation => 7,
            EnvName::FarmingOperation => 8,
        }
    }
}

impl FromStr for EnvName {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| EnvError::UnknownEnv(s.to_string()))
    }
}

impl fmt::Display for EnvName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub name: String,
    pub cap: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ItemKind {
    /// Adds one unit of `resource`; the cell is consumed.
    Pickup { resource: usize },
    /// Adds one unit of `resource`; the cell is depleted until replenished.
    Source { resource: usize },
    /// Fires when every `requires` count is held and `output` has room.
    Station {
        requires: Vec<(usize, u8)>,
        consumes_inputs: bool,
        output: Option<usize>,
        one_shot: bool,
        replenishes_sources: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub tag: String,
    pub label: String,
    pub cell: Cell,
    pub kind: ItemKind,
}

impl Item {
    fn consumable(&self) -> bool {
        matches!(
            self.kind,
            ItemKind::Pickup { .. } | ItemKind::Station { one_shot: true, .. }
        )
    }
}

/// Serializable layout record; also the provenance snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSnapshot {
    pub name: String,
    pub width: u16,
    pub height: u16,
    pub agent_start: Cell,
    pub resources: Vec<Resource>,
    pub items: Vec<Item>,
    pub step_penalty: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnvSnapshot", into = "EnvSnapshot")]
pub struct GridEnv {
    pub name: String,
    pub width: u16,
    pub height: u16,
    pub agent_start: Cell,
    pub resources: Vec<Resource>,
    pub items: Vec<Item>,
    pub step_penalty: f64,
    pub seed: u64,
    cell_items: Vec<Option<u8>>,
    label_vocab: Vec<String>,
}

impl TryFrom<EnvSnapshot> for GridEnv {
    type Error = EnvError;

    fn try_from(s: EnvSnapshot) -> Result<Self, Self::Error> {
        let mut env = GridEnv::custom(&s.name, s.width, s.height, s.agent_start, s.resources, s.items)?;
        env.step_penalty = s.step_penalty;
        env.seed = s.seed;
        Ok(env)
    }
}

impl From<GridEnv> for EnvSnapshot {
    fn from(e: GridEnv) -> Self {
        EnvSnapshot {
            name: e.name,
            width: e.width,
            height: e.height,
            agent_start: e.agent_start,
            resources: e.resources,
            items: e.items,
            step_penalty: e.step_penalty,
            seed: e.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnvState {
    pub agent: Cell,
    pub inventory: [u8; MAX_RESOURCES],
    /// Bit i set when item i has been used up.
    pub consumed: u64,
    /// Bit i set when source item i is waiting to be replenished.
    pub depleted: u64,
    pub step_count: u32,
}

/// The Markov part of an [`EnvState`] (everything but the step counter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub agent: Cell,
    pub inventory: [u8; MAX_RESOURCES],
    pub consumed: u64,
    pub depleted: u64,
}

impl EnvState {
    pub fn key(&self) -> StateKey {
        StateKey {
            agent: self.agent,
            inventory: self.inventory,
            consumed: self.consumed,
            depleted: self.depleted,
        }
    }
}

impl StateKey {
    pub fn to_state(self) -> EnvState {
        EnvState {
            agent: self.agent,
            inventory: self.inventory,
            consumed: self.consumed,
            depleted: self.depleted,
            step_count: 0,
        }
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = self
            .inventory
            .iter()
            .map(u8::to_string)
            .collect::<Vec<_>>()
            .join(".");
        write!(
            f,
            "{},{}|{}|{:x}|{:x}",
            self.agent.x, self.agent.y, inv, self.consumed, self.depleted
        )
    }
}

impl FromStr for StateKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad state key `{s}`");
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let (x, y) = parts[0].split_once(',').ok_or_else(bad)?;
        let mut inventory = [0u8; MAX_RESOURCES];
        let counts: Vec<&str> = parts[1].split('.').collect();
        if counts.len() != MAX_RESOURCES {
            return Err(bad());
        }
        for (slot, c) in inventory.iter_mut().zip(counts) {
            *slot = c.parse().map_err(|_| bad())?;
        }
        Ok(StateKey {
            agent: Cell::new(x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?),
            inventory,
            consumed: u64::from_str_radix(parts[2], 16).map_err(|_| bad())?,
            depleted: u64::from_str_radix(parts[3], 16).map_err(|_| bad())?,
        })
    }
}

/// Result of one environment step. `event` is the index of the item whose
/// interaction succeeded, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: EnvState,
    pub event: Option<usize>,
}

impl GridEnv {
    pub fn custom(
        name: &str,
        width: u16,
        height: u16,
        agent_start: Cell,
        resources: Vec<Resource>,
        items: Vec<Item>,
    ) -> Result<Self, EnvError> {
        if width == 0 || height == 0 {
            return Err(EnvError::InvalidLayout("grid must be non-empty".into()));
        }
        if resources.len() > MAX_RESOURCES {
            return Err(EnvError::InvalidLayout(format!(
                "at most {MAX_RESOURCES} resources supported"
            )));
        }
        if items.len() > MAX_ITEMS {
            return Err(EnvError::InvalidLayout(format!("at most {MAX_ITEMS} items supported")));
        }
        let in_bounds = |c: Cell| c.x < width && c.y < height;
        if !in_bounds(agent_start) {
            return Err(EnvError::InvalidLayout(format!("agent start {agent_start} out of bounds")));
        }
        let mut cell_items = vec![None; width as usize * height as usize];
        for (i, item) in items.iter().enumerate() {
            if !in_bounds(item.cell) {
                return Err(EnvError::InvalidLayout(format!(
                    "item `{}` at {} out of bounds",
                    item.tag, item.cell
                )));
            }
            let slot = &mut cell_items[item.cell.y as usize * width as usize + item.cell.x as usize];
            if slot.is_some() {
                return Err(EnvError::InvalidLayout(format!("two items share cell {}", item.cell)));
            }
            *slot = Some(i as u8);
            let refs: Vec<usize> = match &item.kind {
                ItemKind::Pickup { resource } | ItemKind::Source { resource } => vec![*resource],
                ItemKind::Station { requires, output, .. } => requires
                    .iter()
                    .map(|(r, _)| *r)
                    .chain(output.iter().copied())
                    .collect(),
            };
            if refs.iter().any(|&r| r >= resources.len()) {
                return Err(EnvError::InvalidLayout(format!(
                    "item `{}` references an unknown resource",
                    item.tag
                )));
            }
            if item.label == NONE_SYMBOL {
                return Err(EnvError::InvalidLayout("`none` is reserved".into()));
            }
        }
        let mut label_vocab: Vec<String> = Vec::new();
        for item in &items {
            if !label_vocab.contains(&item.label) {
                label_vocab.push(item.label.clone());
            }
        }
        Ok(Self {
            name: name.to_string(),
            width,
            height,
            agent_start,
            resources,
            items,
            step_penalty: -0.001,
            seed: 0,
            cell_items,
            label_vocab,
        })
    }

    pub fn snapshot(&self) -> EnvSnapshot {
        self.clone().into()
    }

    /// Labels this environment can emit, excluding `none`.
    pub fn label_vocab(&self) -> &[String] {
        &self.label_vocab
    }

    pub fn resource_index(&self, name: &str) -> Option<usize> {
        self.resources.iter().position(|r| r.name == name)
    }

    pub fn item_at(&self, cell: Cell) -> Option<usize> {
        if cell.x >= self.width || cell.y >= self.height {
            return None;
        }
        self.cell_items[cell.y as usize * self.width as usize + cell.x as usize].map(usize::from)
    }

    pub fn reset(&self) -> EnvState {
        EnvState {
            agent: self.agent_start,
            inventory: [0; MAX_RESOURCES],
            consumed: 0,
            depleted: 0,
            step_count: 0,
        }
    }

    pub fn step(&self, s: &EnvState, a: Action) -> Transition {
        let mut next = *s;
        next.step_count = s.step_count.saturating_add(1);
        let mut event = None;
        match a {
            Action::Up => next.agent.y = s.agent.y.saturating_sub(1),
            Action::Down => next.agent.y = (s.agent.y + 1).min(self.height - 1),
            Action::Left => next.agent.x = s.agent.x.saturating_sub(1),
            Action::Right => next.agent.x = (s.agent.x + 1).min(self.width - 1),
            Action::Interact => {
                if let Some(i) = self.item_at(s.agent) {
                    if self.interact(i, &mut next) {
                        event = Some(i);
                    }
                }
            }
        }
        Transition { state: next, event }
    }

    /// Applies a successful interaction with item `i` to `s`.
    fn interact(&self, i: usize, s: &mut EnvState) -> bool {
        let bit = 1u64 << i;
        if s.consumed & bit != 0 {
            return false;
        }
        let has_room = |s: &EnvState, r: usize| s.inventory[r] < self.resources[r].cap;
        match &self.items[i].kind {
            ItemKind::Pickup { resource } => {
                if !has_room(s, *resource) {
                    return false;
                }
                s.inventory[*resource] += 1;
                s.consumed |= bit;
            }
            ItemKind::Source { resource } => {
                if s.depleted & bit != 0 || !has_room(s, *resource) {
                    return false;
                }
                s.inventory[*resource] += 1;
                s.depleted |= bit;
            }
            ItemKind::Station {
                requires,
                consumes_inputs,
                output,
                one_shot,
                replenishes_sources,
            } => {
                if requires.iter().any(|&(r, n)| s.inventory[r] < n) {
                    return false;
                }
                if let Some(out) = output {
                    let freed = if *consumes_inputs {
                        requires.iter().find(|(r, _)| r == out).map_or(0, |(_, n)| *n)
                    } else {
                        0
                    };
                    if s.inventory[*out] - freed >= self.resources[*out].cap {
                        return false;
                    }
                }
                if *consumes_inputs {
                    for &(r, n) in requires {
                        s.inventory[r] -= n;
                    }
                }
                if let Some(out) = output {
                    s.inventory[*out] += 1;
                }
                if *one_shot {
                    s.consumed |= bit;
                }
                if *replenishes_sources {
                    s.depleted = 0;
                }
            }
        }
        true
    }

    /// Deterministic transition; the environment itself never terminates, so
    /// the flag is always `false` (task completion lives in the automaton).
    pub fn env_step(&self, s: &EnvState, a: Action) -> (EnvState, bool) {
        (self.step(s, a).state, false)
    }

    /// Event symbol emitted by the transition `prev --a--> next`.
    pub fn label(&self, prev: &EnvState, a: Action, next: &EnvState) -> &str {
        if a != Action::Interact || prev.key() == next.key() {
            return NONE_SYMBOL;
        }
        match self.item_at(prev.agent) {
            Some(i) => &self.items[i].label,
            None => NONE_SYMBOL,
        }
    }

    fn consumable_mask(&self) -> u64 {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.consumable())
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    fn source_mask(&self) -> u64 {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| matches!(it.kind, ItemKind::Source { .. }))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Size of the full Cartesian state space (cells × consumption × depletion × inventory).
    pub fn state_space_size(&self) -> u128 {
        let cells = self.width as u128 * self.height as u128;
        let masks = 1u128 << (self.consumable_mask().count_ones() + self.source_mask().count_ones());
        let inv: u128 = self.resources.iter().map(|r| r.cap as u128 + 1).product();
        cells * masks * inv
    }

    pub fn enumerate_states(&self) -> Result<Vec<EnvState>, EnvError> {
        self.enumerate_states_bounded(DEFAULT_STATE_BOUND)
    }

    pub fn enumerate_states_bounded(&self, bound: usize) -> Result<Vec<EnvState>, EnvError> {
        let size = self.state_space_size();
        if size > bound as u128 {
            return Err(EnvError::StateBoundExceeded { size, bound });
        }
        let consumed_masks = submasks(self.consumable_mask());
        let depleted_masks = submasks(self.source_mask());
        let mut inventories = vec![[0u8; MAX_RESOURCES]];
        for (r, res) in self.resources.iter().enumerate() {
            inventories = inventories
                .into_iter()
                .flat_map(|inv| {
                    (0..=res.cap).map(move |c| {
                        let mut next = inv;
                        next[r] = c;
                        next
                    })
                })
                .collect();
        }
        let mut out = Vec::with_capacity(size as usize);
        for y in 0..self.height {
            for x in 0..self.width {
                for &consumed in &consumed_masks {
                    for &depleted in &depleted_masks {
                        for inv in &inventories {
                            out.push(EnvState {
                                agent: Cell::new(x, y),
                                inventory: *inv,
                                consumed,
                                depleted,
                                step_count: 0,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut sub = mask;
    loop {
        out.push(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

/// Places `count` cells using the shared anchor sequence for `seed`, probing a
/// seeded shuffle of the grid when two anchors land on the same cell.
fn anchored_cells(seed: u64, width: u16, height: u16, count: usize) -> Vec<Cell> {
    let mut anchors = ChaCha8Rng::seed_from_u64(seed ^ LAYOUT_SALT);
    let mut probe_order: Vec<Cell> = (0..height)
        .flat_map(|y| (0..width).map(move |x| Cell::new(x, y)))
        .collect();
    let mut probe_rng =
        ChaCha8Rng::seed_from_u64(seed ^ PROBE_SALT ^ ((width as u64) << 16 | height as u64));
    probe_order.shuffle(&mut probe_rng);

    let mut taken: Vec<Cell> = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = anchors.random();
        let v: f64 = anchors.random();
        let c = Cell::new(
            ((u * width as f64) as u16).min(width - 1),
            ((v * height as f64) as u16).min(height - 1),
        );
        let c = if taken.contains(&c) {
            *probe_order
                .iter()
                .find(|p| !taken.contains(p))
                .expect("grid has room for every anchor")
        } else {
            c
        };
        taken.push(c);
    }
    taken
}

fn number_of_sources(width: u16, height: u16) -> usize {
    (width as usize * height as usize / 50).clamp(3, 12)
}

struct RoleSpec {
    tag: String,
    label: &'static str,
    kind: ItemKind,
}

fn pickup(tag: &str, resource: usize) -> RoleSpec {
    RoleSpec {
        tag: tag.into(),
        label: leak_label(tag),
        kind: ItemKind::Pickup { resource },
    }
}

fn leak_label(tag: &str) -> &'static str {
    // Labels are a closed set; map tags onto static strings.
    match tag {
        "key" => "key",
        "shield" => "shield",
        "map" => "map",
        "medkit" => "medkit",
        "clue" => "clue",
        "shovel" => "shovel",
        _ => unreachable!("no static label for {tag}"),
    }
}

fn gate(tag: &str, label: &'static str, requires: Vec<(usize, u8)>, output: Option<usize>) -> RoleSpec {
    RoleSpec {
        tag: tag.into(),
        label,
        kind: ItemKind::Station {
            requires,
            consumes_inputs: false,
            output,
            one_shot: true,
            replenishes_sources: false,
        },
    }
}

fn res(name: &str, cap: u8) -> Resource {
    Resource {
        name: name.into(),
        cap,
    }
}

/// Gather/convert/deliver economy shared by the craftsman, mining and farming tasks.
fn cycle_roles(
    raw: &str,
    raw_label: &'static str,
    converter: &str,
    convert_label: &'static str,
    outlet: &str,
    sources: usize,
) -> Vec<RoleSpec> {
    let mut roles = vec![
        RoleSpec {
            tag: converter.into(),
            label: convert_label,
            kind: ItemKind::Station {
                requires: vec![(0, 2)],
                consumes_inputs: true,
                output: Some(1),
                one_shot: false,
                replenishes_sources: true,
            },
        },
        RoleSpec {
            tag: outlet.into(),
            label: "deliver",
            kind: ItemKind::Station {
                requires: vec![(1, 1)],
                consumes_inputs: true,
                output: None,
                one_shot: false,
                replenishes_sources: false,
            },
        },
    ];
    for k in 0..sources {
        roles.push(RoleSpec {
            tag: format!("{raw}_{k}"),
            label: raw_label,
            kind: ItemKind::Source { resource: 0 },
        });
    }
    roles
}

pub fn make_env(name: EnvName, seed: u64) -> Result<GridEnv, EnvError> {
    make_env_sized(name, seed, None)
}

/// Builds one of the six named environments; `size` overrides the side length.
pub fn make_env_sized(name: EnvName, seed: u64, size: Option<u16>) -> Result<GridEnv, EnvError> {
    let side = size.unwrap_or_else(|| name.default_size());
    let (width, height) = (side, side);
    let (resources, roles) = match name {
        EnvName::DungeonQuest => (
            vec![res("key", 1), res("shield", 1), res("sword", 1)],
            vec![
                pickup("key", 0),
                pickup("shield", 1),
                gate("chest", "sword", vec![(0, 1)], Some(2)),
                gate("dragon", "dragon", vec![(2, 1), (1, 1)], None),
            ],
        ),
        EnvName::RescueMission => (
            vec![res("map", 1), res("victim", 1), res("medkit", 1)],
            vec![
                pickup("map", 0),
                gate("victim", "victim", vec![(0, 1)], Some(1)),
                pickup("medkit", 2),
                gate("base", "base", vec![(1, 1), (2, 1)], None),
            ],
        ),
        EnvName::TreasureHunt => (
            vec![res("clue", 1), res("cipher", 1), res("shovel", 1)],
            vec![
                pickup("clue", 0),
                gate("decode", "decode", vec![(0, 1)], Some(1)),
                pickup("shovel", 2),
                gate("dig", "dig", vec![(1, 1), (2, 1)], None),
            ],
        ),
        EnvName::BlindCraftsman => (
            vec![res("wood", 2), res("product", 3)],
            cycle_roles("wood", "wood", "bench", "craft", "delivery", number_of_sources(width, height)),
        ),
        EnvName::MiningOperation => (
            vec![res("ore", 2), res("ingot", 3)],
            cycle_roles("ore", "ore", "furnace", "smelt", "depot", number_of_sources(width, height)),
        ),
        EnvName::FarmingOperation => (
            vec![res("seed", 2), res("crop", 3)],
            cycle_roles("seed", "seed", "field", "harvest", "market", number_of_sources(width, height)),
        ),
    };

    let cells = width as usize * height as usize;
    let needed = roles.len() + 1;
    if cells < needed {
        return Err(EnvError::TooSmall {
            width,
            height,
            cells,
            needed,
        });
    }
    let placed = anchored_cells(seed, width, height, needed);
    let items = roles
        .into_iter()
        .zip(&placed[1..])
        .map(|(r, &cell)| Item {
            tag: r.tag,
            label: r.label.to_string(),
            cell,
            kind: r.kind,
        })
        .collect();
    let mut env = GridEnv::custom(name.as_str(), width, height, placed[0], resources, items)?;
    env.seed = seed;
    Ok(env)
}
