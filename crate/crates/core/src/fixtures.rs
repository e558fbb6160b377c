//! Built-in DFAs for the six environments and the bundled concept embeddings.

use std::path::PathBuf;
use std::sync::Arc;

use crate::dfa::{Dfa, DfaError};
use crate::env::{make_env, EnvError, EnvName};
use crate::llm::PromptSpec;
use crate::semantic::{CachedEmbedder, EmbedError, FixtureProvider, HashedBowProvider};

/// Hand-built concept vectors covering every built-in state description.
pub const CONCEPT_EMBEDDINGS: &str = include_str!("../fixtures/embeddings/concepts.json");

pub fn dfa_source(name: EnvName) -> &'static str {
    match name {
        EnvName::DungeonQuest => include_str!("../fixtures/dfa/dungeon_quest.json"),
        EnvName::BlindCraftsman => include_str!("../fixtures/dfa/blind_craftsman.json"),
        EnvName::RescueMission => include_str!("../fixtures/dfa/rescue_mission.json"),
        EnvName::TreasureHunt => include_str!("../fixtures/dfa/treasure_hunt.json"),
        EnvName::MiningOperation => include_str!("../fixtures/dfa/mining_operation.json"),
        EnvName::FarmingOperation => include_str!("../fixtures/dfa/farming_operation.json"),
    }
}

pub fn builtin_dfa(name: EnvName) -> Result<Dfa, DfaError> {
    Dfa::parse(dfa_source(name))
}

/// Natural-language task statement handed to the automaton generator.
pub fn task_description(name: EnvName) -> &'static str {
    match name {
        EnvName::DungeonQuest => {
            "Dungeon Quest: collect the key, then the shield, then open the chest to obtain the sword, \
             then defeat the dragon. The order is strict."
        }
        EnvName::BlindCraftsman => {
            "Blind Craftsman: gather wood, craft a product at the bench, deliver it, and repeat the \
             gather, craft and deliver cycle a second time. Wood capacity is 2, product capacity is 3."
        }
        EnvName::RescueMission => {
            "Rescue Mission: find the map, locate the victim, get the medkit, then return to base."
        }
        EnvName::TreasureHunt => "Treasure Hunt: find the clue, decode it, get the shovel, then dig up the treasure.",
        EnvName::MiningOperation => {
            "Mining Operation: collect ore, smelt it into ingots at the furnace, and deliver the \
             ingots to the depot, five times over."
        }
        EnvName::FarmingOperation => {
            "Farming Operation: plant seeds, harvest the crops, and deliver them to the market twice, \
             then gather seeds for the next season."
        }
    }
}

/// Prompt for an environment, with its label vocabulary.
pub fn prompt_spec(name: EnvName) -> Result<PromptSpec, EnvError> {
    let env = make_env(name, 0)?;
    Ok(PromptSpec {
        task_description: task_description(name).to_string(),
        vocabulary: env.label_vocab().to_vec(),
        schema: crate::llm::DFA_SCHEMA.to_string(),
    })
}

/// Bundled replay fixture by name, e.g. `dungeon_v1`.
pub fn replay_fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join("llm")
        .join(format!("{name}.json"))
}

/// Concept vectors with a hashed bag-of-words block for unknown texts.
pub fn concept_provider() -> Result<FixtureProvider, EmbedError> {
    FixtureProvider::from_json("concepts", CONCEPT_EMBEDDINGS, Some(HashedBowProvider::default()))
}

pub fn concept_embedder() -> Result<CachedEmbedder, EmbedError> {
    Ok(CachedEmbedder::new(Arc::new(concept_provider()?)))
}
