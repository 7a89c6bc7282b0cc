//! JSON Schemas (draft 2020-12) for every response body.

pub const META: &str = include_str!("../schemas/meta.json");
pub const TOPICS: &str = include_str!("../schemas/topics.json");
pub const LABEL: &str = include_str!("../schemas/label.json");
pub const SALIENT: &str = include_str!("../schemas/salient.json");
pub const TREND: &str = include_str!("../schemas/trend.json");
pub const METRICS: &str = include_str!("../schemas/metrics.json");
pub const RETRIEVE: &str = include_str!("../schemas/retrieve.json");
pub const SUMMARIZE: &str = include_str!("../schemas/summarize.json");
pub const SESSION: &str = include_str!("../schemas/session.json");
pub const CHAT: &str = include_str!("../schemas/chat.json");
pub const ERROR: &str = include_str!("../schemas/error.json");

/// `(name, schema)` for every response type.
pub const ALL: &[(&str, &str)] = &[
    ("meta", META),
    ("topics", TOPICS),
    ("label", LABEL),
    ("salient", SALIENT),
    ("trend", TREND),
    ("metrics", METRICS),
    ("retrieve", RETRIEVE),
    ("summarize", SUMMARIZE),
    ("session", SESSION),
    ("chat", CHAT),
    ("error", ERROR),
];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
