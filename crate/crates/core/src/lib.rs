//! A context-scripted conversational agent.
//!
//! Scripts group pattern/response rules into named contexts. The dialogue
//! engine keeps one current context per session, tries its rules first, falls
//! back to other contexts' triggers, and follows `#goto` transfers. A
//! question-answering provider can be put in front of the engine, and logged
//! transcripts can be replayed and scored.

pub mod matcher;
pub mod script;
pub mod engine;
pub mod qa;
pub mod store;
pub mod pack;
pub mod corpus;
