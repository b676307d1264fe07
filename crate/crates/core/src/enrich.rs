//! Model-input variants: local paragraph context, gloss attachments and
//! commonsense inference attachments.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lexicon::GlossStore;
use crate::{Error, Result};

/// Separator between the base text and each attachment.
pub const SEPARATOR: &str = " [SEP] ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    #[default]
    Sentence,
    Paragraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttachmentKind {
    Gloss,
    Inference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub kind: AttachmentKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichedInput {
    pub base: String,
    pub context_mode: ContextMode,
    pub attachments: Vec<Attachment>,
    pub rendered: String,
}

impl EnrichedInput {
    fn new(base: &str, local: String, context_mode: ContextMode, attachments: Vec<Attachment>) -> Self {
        let mut rendered = local;
        for a in &attachments {
            rendered.push_str(SEPARATOR);
            rendered.push_str(&a.text);
        }
        EnrichedInput {
            base: base.into(),
            context_mode,
            attachments,
            rendered,
        }
    }

    pub fn attachment_kinds(&self) -> Vec<AttachmentKind> {
        self.attachments.iter().map(|a| a.kind).collect()
    }
}

/// A sentence with optional neighbours, borrowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalContext<'a> {
    pub text: &'a str,
    pub prev: Option<&'a str>,
    pub next: Option<&'a str>,
}

impl<'a> LocalContext<'a> {
    pub fn new(text: &'a str, prev: Option<&'a str>, next: Option<&'a str>) -> Self {
        LocalContext { text, prev, next }
    }
}

/// Sentence mode returns the text; paragraph mode joins the available
/// neighbours around it with single spaces.
pub fn render_local(ctx: &LocalContext<'_>, mode: ContextMode) -> String {
    match mode {
        ContextMode::Sentence => ctx.text.into(),
        ContextMode::Paragraph => {
            let parts: Vec<&str> = ctx.prev.into_iter().chain([ctx.text]).chain(ctx.next).collect();
            parts.join(" ")
        }
    }
}

/// Appends up to `n` glosses for each component word of `mwe`, formatted as
/// `word: gloss`.
pub fn attach_glosses(base: &str, mwe: &str, store: &GlossStore, n: usize) -> EnrichedInput {
    let attachments = mwe
        .split_whitespace()
        .flat_map(|word| {
            store.glosses_for(word, n).iter().map(move |g| Attachment {
                kind: AttachmentKind::Gloss,
                text: format!("{word}: {g}"),
            })
        })
        .collect();
    EnrichedInput::new(base, base.into(), ContextMode::Sentence, attachments)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "xNeed")]
    XNeed,
    #[serde(rename = "xIntent")]
    XIntent,
    #[serde(rename = "xWant")]
    XWant,
    #[serde(rename = "xReact")]
    XReact,
    #[serde(rename = "xEffect")]
    XEffect,
    #[serde(rename = "xAttr")]
    XAttr,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::XNeed,
        Relation::XIntent,
        Relation::XWant,
        Relation::XReact,
        Relation::XEffect,
        Relation::XAttr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::XNeed => "xNeed",
            Relation::XIntent => "xIntent",
            Relation::XWant => "xWant",
            Relation::XReact => "xReact",
            Relation::XEffect => "xEffect",
            Relation::XAttr => "xAttr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceRecord {
    pub doc_id: String,
    pub index: usize,
    pub relation: Relation,
    pub text: String,
}

/// Precomputed inferences keyed by sentence coordinates, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InferenceStore {
    by_key: BTreeMap<(String, usize), Vec<InferenceRecord>>,
}

impl InferenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: InferenceRecord) {
        self.by_key
            .entry((record.doc_id.clone(), record.index))
            .or_default()
            .push(record);
    }

    pub fn get(&self, doc_id: &str, index: usize) -> &[InferenceRecord] {
        // BTreeMap lookups need an owned key for tuple keys.
        self.by_key
            .get(&(String::from(doc_id), index))
            .map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.by_key.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }
}

impl FromIterator<InferenceRecord> for InferenceStore {
    fn from_iter<T: IntoIterator<Item = InferenceRecord>>(iter: T) -> Self {
        let mut store = InferenceStore::new();
        for r in iter {
            store.push(r);
        }
        store
    }
}

/// The two inference budgets that are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum InferenceCount {
    Five,
    Twelve,
}

impl InferenceCount {
    pub fn get(self) -> usize {
        match self {
            InferenceCount::Five => 5,
            InferenceCount::Twelve => 12,
        }
    }
}

impl TryFrom<usize> for InferenceCount {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        match k {
            5 => Ok(InferenceCount::Five),
            12 => Ok(InferenceCount::Twelve),
            other => Err(Error::InvalidInferenceCount(other)),
        }
    }
}

impl From<InferenceCount> for usize {
    fn from(k: InferenceCount) -> usize {
        k.get()
    }
}

/// Appends the first `k` stored inferences for `(doc_id, index)` to the
/// locally rendered sentence. Each attachment reads `relation: text`.
pub fn attach_inferences(
    ctx: &LocalContext<'_>,
    doc_id: &str,
    index: usize,
    store: &InferenceStore,
    k: InferenceCount,
    mode: ContextMode,
) -> EnrichedInput {
    let attachments = store
        .get(doc_id, index)
        .iter()
        .take(k.get())
        .map(|r| Attachment {
            kind: AttachmentKind::Inference,
            text: format!("{}: {}", r.relation.as_str(), r.text),
        })
        .collect();
    EnrichedInput::new(ctx.text, render_local(ctx, mode), mode, attachments)
}

/// External knowledge attached on top of the local context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Knowledge {
    #[default]
    None,
    Gloss { n: usize },
    Inference { k: InferenceCount },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EnrichConfig {
    pub context: ContextMode,
    pub knowledge: Knowledge,
}

impl EnrichConfig {
    /// Glosses are only defined on top of sentence context.
    pub fn validate(&self) -> Result<()> {
        match (self.context, self.knowledge) {
            (ContextMode::Paragraph, Knowledge::Gloss { .. }) => Err(Error::UnsupportedCombination),
            _ => Ok(()),
        }
    }
}

/// Read-only stores consulted during enrichment.
#[derive(Debug, Clone, Copy, Default)]
pub struct KnowledgeSources<'a> {
    pub glosses: Option<&'a GlossStore>,
    pub inferences: Option<&'a InferenceStore>,
}

/// Renders one sentence under `config`. A missing store behaves as empty.
pub fn enrich(
    ctx: &LocalContext<'_>,
    mwe: &str,
    doc_id: &str,
    index: usize,
    config: &EnrichConfig,
    sources: &KnowledgeSources<'_>,
) -> Result<EnrichedInput> {
    config.validate()?;
    let empty_glosses = GlossStore::new();
    let empty_inferences = InferenceStore::new();
    Ok(match config.knowledge {
        Knowledge::None => EnrichedInput::new(ctx.text, render_local(ctx, config.context), config.context, Vec::new()),
        Knowledge::Gloss { n } => attach_glosses(ctx.text, mwe, sources.glosses.unwrap_or(&empty_glosses), n),
        Knowledge::Inference { k } => attach_inferences(
            ctx,
            doc_id,
            index,
            sources.inferences.unwrap_or(&empty_inferences),
            k,
            config.context,
        ),
    })
}
