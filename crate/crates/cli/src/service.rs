//! Read-only JSON over HTTP for the explorer.
//!
//! | route | |
//! |---|---|
//! | `GET /api/instances` | names and sizes |
//! | `GET /api/instances/{name}` | both trees, happy edges, keys |
//! | `GET /api/instances/{name}/trees/{key}` | a tree with its legal flips and overlays |
//! | `POST /api/instances/{name}/flip` | `{"tree": key, "removed": [a,b], "inserted": [c,d]}` |
//! | `POST /api/instances/{name}/sequence` | `{"moves": [...]}` replayed from the initial tree |
//! | `GET /api/instances/{name}/slice` | `budget`, `first_flip=any\|hull`, `mode=pruned\|budget`, `format=json\|dot`, `node_cap` |
//! | `GET /api/instances/{name}/shortest` | search summary; search flags as query parameters |
//!
//! The server holds no session state: the client sends the tree it is
//! looking at, so equal requests get byte-identical answers. Errors are
//! `{"error": ...}` with 400 (malformed), 404 (unknown instance or tree),
//! 409 (illegal flip or move) or 503 (search cap hit).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use treeflip::export::slice_to_dot;
use treeflip::instances::{corpus, load_dir, Instance, InstanceError};
use treeflip::search::{
    lower_bound, reachable_slice, shortest_sequences, FirstFlipFilter, FlipGraphSlice, SearchError, SearchOptions, SliceMode,
};
use treeflip::sequences::{chain_decomposition, happy_edges, nonperfect_count, parking_edges, FlipSequence, PerfectRule};
use treeflip::{Chord, FlipKind, Move, PlaneTree};

/// Largest node cap a request may ask for.
pub const MAX_NODE_CAP: u64 = 200_000_000;
const DEFAULT_NODE_CAP: u64 = 20_000_000;
const MAX_LISTED_SEQUENCES: usize = 1_000;

/// The instances being served, fixed at startup.
#[derive(Debug, Default)]
pub struct Corpus {
    instances: BTreeMap<String, Instance>,
}

impl Corpus {
    /// Built-in instances, then every instance file in `dir` (same name
    /// replaces the built-in one).
    pub fn load(dir: Option<&Path>) -> Result<Self, InstanceError> {
        let mut instances: BTreeMap<String, Instance> = corpus().into_iter().map(|i| (i.name.clone(), i)).collect();
        if let Some(dir) = dir {
            for inst in load_dir(dir)? {
                instances.insert(inst.name.clone(), inst);
            }
        }
        Ok(Self { instances })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.instances.keys().map(String::as_str)
    }

    fn get(&self, name: &str) -> Result<&Instance, ApiError> {
        self.instances
            .get(name)
            .ok_or_else(|| ApiError::NotFound(format!("unknown instance {name}")))
    }
}

pub fn router(corpus: Arc<Corpus>) -> Router {
    Router::new()
        .route("/api/instances", get(list_instances))
        .route("/api/instances/{name}", get(get_instance))
        .route("/api/instances/{name}/trees/{key}", get(get_tree))
        .route("/api/instances/{name}/flip", post(apply_flip))
        .route("/api/instances/{name}/sequence", post(replay_sequence))
        .route("/api/instances/{name}/slice", get(get_slice))
        .route("/api/instances/{name}/shortest", get(get_shortest))
        .with_state(corpus)
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    Conflict(String),
    Unavailable(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
            ApiError::Unavailable(m) => (StatusCode::SERVICE_UNAVAILABLE, m),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::PointMismatch { .. } => ApiError::BadRequest(e.to_string()),
            _ => ApiError::Unavailable(e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Serialize)]
struct InstanceSummary {
    name: String,
    n: usize,
    distance_lower_bound: usize,
}

async fn list_instances(State(corpus): State<Arc<Corpus>>) -> Json<Vec<InstanceSummary>> {
    let list = corpus
        .instances
        .values()
        .map(|i| InstanceSummary {
            name: i.name.clone(),
            n: i.n,
            distance_lower_bound: lower_bound(&i.t_initial, &i.t_final).unwrap_or(0),
        })
        .collect();
    Json(list)
}

#[derive(Serialize)]
struct InstanceView {
    name: String,
    n: usize,
    provenance: String,
    initial: TreeSummary,
    r#final: TreeSummary,
    happy: Vec<Chord>,
    distance_lower_bound: usize,
}

#[derive(Serialize)]
struct TreeSummary {
    key: String,
    chords: Vec<Chord>,
}

impl From<&PlaneTree> for TreeSummary {
    fn from(t: &PlaneTree) -> Self {
        Self {
            key: t.key().to_string(),
            chords: t.to_vec(),
        }
    }
}

async fn get_instance(State(corpus): State<Arc<Corpus>>, UrlPath(name): UrlPath<String>) -> ApiResult<InstanceView> {
    let inst = corpus.get(&name)?;
    Ok(Json(InstanceView {
        name: inst.name.clone(),
        n: inst.n,
        provenance: inst.provenance.clone(),
        initial: (&inst.t_initial).into(),
        r#final: (&inst.t_final).into(),
        happy: happy(inst),
        distance_lower_bound: lower_bound(&inst.t_initial, &inst.t_final).map_err(ApiError::from)?,
    }))
}

fn happy(inst: &Instance) -> Vec<Chord> {
    happy_edges(&inst.t_initial, &inst.t_final)
        .expect("instance trees share n")
        .iter()
        .collect()
}

#[derive(Serialize)]
struct FlipView {
    removed: Chord,
    inserted: Chord,
    kind: FlipKind,
    perfect: bool,
}

#[derive(Serialize)]
struct Overlays {
    /// Chords shared by the instance's two trees.
    happy: Vec<Chord>,
    /// The final tree.
    target: Vec<Chord>,
    /// Chords of this tree that are also in the final tree.
    in_target: Vec<Chord>,
    /// Chords of the final tree this tree still lacks.
    missing: Vec<Chord>,
}

#[derive(Serialize)]
struct TreeView {
    key: String,
    n: usize,
    chords: Vec<Chord>,
    is_target: bool,
    flips: Vec<FlipView>,
    overlays: Overlays,
}

fn tree_view(inst: &Instance, t: &PlaneTree) -> TreeView {
    let target = &inst.t_final;
    let flips = t
        .legal_flips()
        .into_iter()
        .map(|f| FlipView {
            removed: f.removed,
            inserted: f.inserted,
            kind: f.kind,
            perfect: PerfectRule::Strict.is_perfect(f.as_move(), target),
        })
        .collect();
    TreeView {
        key: t.key().to_string(),
        n: t.n(),
        chords: t.to_vec(),
        is_target: t == target,
        flips,
        overlays: Overlays {
            happy: happy(inst),
            target: target.to_vec(),
            in_target: t.chord_set().intersection(target.chord_set()).iter().collect(),
            missing: target.chord_set().difference(t.chord_set()).iter().collect(),
        },
    }
}

fn parse_tree(inst: &Instance, key: &str) -> Result<PlaneTree, ApiError> {
    let t = PlaneTree::from_key(key).map_err(|e| ApiError::BadRequest(format!("bad tree key {key}: {e}")))?;
    if t.n() != inst.n {
        return Err(ApiError::NotFound(format!(
            "tree {key} has {} points, instance {} has {}",
            t.n(),
            inst.name,
            inst.n
        )));
    }
    Ok(t)
}

async fn get_tree(State(corpus): State<Arc<Corpus>>, UrlPath((name, key)): UrlPath<(String, String)>) -> ApiResult<TreeView> {
    let inst = corpus.get(&name)?;
    let t = parse_tree(inst, &key)?;
    Ok(Json(tree_view(inst, &t)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlipRequest {
    tree: String,
    removed: Chord,
    inserted: Chord,
}

#[derive(Serialize)]
struct FlipResponse {
    applied: FlipView,
    tree: TreeView,
}

async fn apply_flip(
    State(corpus): State<Arc<Corpus>>,
    UrlPath(name): UrlPath<String>,
    body: Result<Json<FlipRequest>, JsonRejection>,
) -> ApiResult<FlipResponse> {
    let inst = corpus.get(&name)?;
    let Json(req) = body?;
    let t = parse_tree(inst, &req.tree)?;
    let next = t
        .apply_flip(req.removed, req.inserted)
        .map_err(|e| ApiError::Conflict(e.to_string()))?;
    let kind = t.classify_flip(req.removed, req.inserted).map_err(|e| ApiError::Conflict(e.to_string()))?;
    Ok(Json(FlipResponse {
        applied: FlipView {
            removed: req.removed,
            inserted: req.inserted,
            kind,
            perfect: PerfectRule::Strict.is_perfect(Move::new(req.removed, req.inserted), &inst.t_final),
        },
        tree: tree_view(inst, &next),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceRequest {
    moves: Vec<Move>,
}

#[derive(Serialize)]
struct ChainView {
    root: Chord,
    trace_length: usize,
    links: Vec<Chord>,
    flips: Vec<usize>,
}

#[derive(Serialize)]
struct SequenceView {
    length: usize,
    nonperfect: usize,
    parking: Vec<Chord>,
    chains: Vec<ChainView>,
    end: TreeView,
}

async fn replay_sequence(
    State(corpus): State<Arc<Corpus>>,
    UrlPath(name): UrlPath<String>,
    body: Result<Json<SequenceRequest>, JsonRejection>,
) -> ApiResult<SequenceView> {
    let inst = corpus.get(&name)?;
    let Json(req) = body?;
    let seq = FlipSequence::new(inst.t_initial, req.moves);
    let conflict = |e: treeflip::sequences::SequenceError| ApiError::Conflict(e.to_string());
    let end = seq.end().map_err(conflict)?;
    let chains = chain_decomposition(&seq)
        .into_iter()
        .map(|c| ChainView {
            root: c.root(),
            trace_length: c.trace_length(),
            links: c.links,
            flips: c.flip_indices,
        })
        .collect();
    Ok(Json(SequenceView {
        length: seq.len(),
        nonperfect: nonperfect_count(&seq, &inst.t_final),
        parking: parking_edges(&seq, &inst.t_final).map_err(conflict)?.iter().collect(),
        chains,
        end: tree_view(inst, &end),
    }))
}

fn node_cap(requested: Option<u64>) -> Result<u64, ApiError> {
    match requested {
        None => Ok(DEFAULT_NODE_CAP),
        Some(c) if c <= MAX_NODE_CAP => Ok(c),
        Some(c) => Err(ApiError::BadRequest(format!("node_cap {c} above the limit {MAX_NODE_CAP}"))),
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FirstFlip {
    #[default]
    Any,
    Hull,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SliceKind {
    /// Paths that can still finish within the optimum length.
    #[default]
    Pruned,
    /// Every path within the non-perfect budget.
    Budget,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Format {
    #[default]
    Json,
    Dot,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceParams {
    #[serde(default = "one")]
    budget: usize,
    #[serde(default)]
    first_flip: FirstFlip,
    #[serde(default)]
    mode: SliceKind,
    #[serde(default)]
    format: Format,
    node_cap: Option<u64>,
}

fn one() -> usize {
    1
}

#[derive(Serialize)]
struct SliceView {
    instance: String,
    budget: usize,
    first_flip: FirstFlip,
    mode: SliceKind,
    node_count: usize,
    arc_count: usize,
    slice: FlipGraphSlice,
}

/// The slice the CLI and the service both export.
pub fn build_slice(
    inst: &Instance,
    budget: usize,
    first_flip: FirstFlip,
    kind: SliceKind,
    node_cap: u64,
) -> Result<FlipGraphSlice, SearchError> {
    let filter = match first_flip {
        FirstFlip::Any => FirstFlipFilter::Any,
        FirstFlip::Hull => FirstFlipFilter::NonPerfectOnHull,
    };
    let mode = match kind {
        SliceKind::Budget => SliceMode::BudgetOnly,
        SliceKind::Pruned => {
            let opts = SearchOptions {
                max_sequences: 0,
                node_cap,
                ..SearchOptions::default()
            };
            SliceMode::LengthPruned(shortest_sequences(&inst.t_initial, &inst.t_final, &opts)?.optimum)
        }
    };
    reachable_slice(&inst.t_initial, &inst.t_final, budget, filter, mode, PerfectRule::Strict, node_cap)
}

async fn get_slice(
    State(corpus): State<Arc<Corpus>>,
    UrlPath(name): UrlPath<String>,
    params: Result<Query<SliceParams>, QueryRejection>,
) -> Result<Response, ApiError> {
    let inst = corpus.get(&name)?.clone();
    let Query(p) = params?;
    let cap = node_cap(p.node_cap)?;
    let (budget, first_flip, mode, format) = (p.budget, p.first_flip, p.mode, p.format);
    let slice = blocking(move || build_slice(&inst, budget, first_flip, mode, cap).map(|s| (inst, s))).await?;
    let (inst, slice) = slice;
    Ok(match format {
        Format::Dot => ([(header::CONTENT_TYPE, "text/vnd.graphviz")], slice_to_dot(&slice)).into_response(),
        Format::Json => Json(SliceView {
            instance: inst.name.clone(),
            budget,
            first_flip,
            mode,
            node_count: slice.node_count(),
            arc_count: slice.arc_count(),
            slice,
        })
        .into_response(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShortestParams {
    #[serde(default = "twenty")]
    max_sequences: usize,
    node_cap: Option<u64>,
    #[serde(default)]
    hull_parking_only: bool,
    #[serde(default)]
    compatible_only: bool,
    #[serde(default)]
    forbid_happy_flips: bool,
    max_nonperfect: Option<usize>,
}

fn twenty() -> usize {
    20
}

#[derive(Serialize)]
struct ShortestView {
    instance: String,
    optimum: usize,
    count: u64,
    lower_bound: usize,
    truncated: bool,
    nodes_expanded: u64,
    sequences: Vec<Vec<Move>>,
}

async fn get_shortest(
    State(corpus): State<Arc<Corpus>>,
    UrlPath(name): UrlPath<String>,
    params: Result<Query<ShortestParams>, QueryRejection>,
) -> ApiResult<ShortestView> {
    let inst = corpus.get(&name)?.clone();
    let Query(p) = params?;
    if p.max_sequences > MAX_LISTED_SEQUENCES {
        return Err(ApiError::BadRequest(format!(
            "max_sequences {} above the limit {MAX_LISTED_SEQUENCES}",
            p.max_sequences
        )));
    }
    let opts = SearchOptions {
        max_nonperfect: p.max_nonperfect,
        restrict_parking_to_hull: p.hull_parking_only,
        forbid_flipping_happy: p.forbid_happy_flips,
        compatible_only: p.compatible_only,
        max_sequences: p.max_sequences,
        node_cap: node_cap(p.node_cap)?,
        ..SearchOptions::default()
    };
    let r = blocking(move || shortest_sequences(&inst.t_initial, &inst.t_final, &opts).map(|r| (inst, r))).await?;
    let (inst, r) = r;
    Ok(Json(ShortestView {
        instance: inst.name,
        optimum: r.optimum,
        count: r.count,
        lower_bound: r.lower_bound,
        truncated: r.is_truncated(),
        nodes_expanded: r.stats.nodes_expanded,
        sequences: r.sequences.into_iter().map(|s| s.moves).collect(),
    }))
}

/// Runs a search off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, SearchError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Unavailable(format!("search worker failed: {e}")))?
        .map_err(ApiError::from)
}
