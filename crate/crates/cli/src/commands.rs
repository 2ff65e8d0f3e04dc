use rand::Rng;
use serde_json::{json, Map, Value};
use tressec_core::bipart::{
    directed_embed, indistinguishable_pairs, maximal_two_star, orientation_embed, recover,
    recover_sparse, Embedding,
};
use tressec_core::gen::{self, NestedShape, STreeShape};
use tressec_core::graphdecomp::{
    decomposition_from_treeset, extract_separations, separation_system, Graph, TreeDecomposition,
};
use tressec_core::json::{Document, GraphDoc, JsonError, Label, SystemJson, FORMAT_VERSION};
use tressec_core::orderbridge::{
    canonize, order_tree_from_oriented, treeset_from_order_tree, verify_order_roundtrip,
};
use tressec_core::orient;
use tressec_core::stree::{
    essentialize, is_essential, is_redundant, is_tight, regularized_core, splitting_sets,
    stree_from_treeset, treeset_from_stree, STree, StarFamily, Step,
};
use tressec_core::treebridge::{
    edge_tree_set, node_orientation, tree_from_treeset, verify_identity_isomorphism,
    verify_node_bijection, GraphTree,
};
use tressec_core::{Members, SeparationSystem, SystemError};

use crate::input::{self, labels, limits, system_of, Failure};
use crate::{GenKind, Target, Theorem};

fn output(doc: &Document, witness: Option<Value>) -> Value {
    serde_json::to_value(doc.envelope(witness)).expect("envelopes serialize")
}

/// Checks in order; once one fails the rest are skipped.
struct Report {
    kind: String,
    checks: Vec<Value>,
    failed: bool,
    properties: Map<String, Value>,
}

impl Report {
    fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), checks: Vec::new(), failed: false, properties: Map::new() }
    }

    fn check(&mut self, name: &str, outcome: Result<(), String>) {
        let entry = match (&outcome, self.failed) {
            (_, true) => json!({"name": name, "status": "skipped"}),
            (Ok(()), false) => json!({"name": name, "status": "pass"}),
            (Err(detail), false) => json!({"name": name, "status": "fail", "detail": detail}),
        };
        self.failed |= outcome.is_err();
        self.checks.push(entry);
    }

    fn property(&mut self, name: &str, value: impl Into<Value>) {
        self.properties.insert(name.to_string(), value.into());
    }

    fn finish(self) -> Result<Value, Failure> {
        let report = json!({
            "kind": self.kind,
            "valid": !self.failed,
            "checks": self.checks,
            "properties": self.properties,
        });
        if self.failed {
            Err(Failure::with_report("invariant failed", report))
        } else {
            Ok(report)
        }
    }
}

pub fn validate(text: &str) -> Result<Value, Failure> {
    let env = input::envelope(text)?;
    if env.format_version != FORMAT_VERSION {
        return Err(Failure::Input(format!("unsupported format version {}", env.format_version)));
    }
    let mut report = Report::new(&env.kind);
    if env.kind == "system" {
        let json: SystemJson = serde_json::from_value(env.payload)
            .map_err(|e| Failure::Input(format!("malformed system: {e}")))?;
        if let Some(sys) = validate_system(json, &mut report) {
            system_properties(&sys, &mut report);
        }
        return report.finish();
    }
    let invariant = match env.kind.as_str() {
        "tree" => "tree",
        "order_tree" => "order_tree",
        "bipartition_family" => "bipartitions",
        "stree" => "stree_labelling",
        "graph" => "simple_graph",
        "tree_decomposition" => "tree_decomposition",
        other => return Err(Failure::Input(format!("unknown kind {other}"))),
    };
    match Document::from_envelope(env) {
        Ok(doc) => {
            report.check(invariant, Ok(()));
            document_properties(&doc, &mut report);
        }
        Err(e @ JsonError::Invalid { .. }) => report.check(invariant, Err(e.to_string())),
        Err(e) => return Err(e.into()),
    }
    report.finish()
}

fn validate_system(json: SystemJson, report: &mut Report) -> Option<SeparationSystem> {
    let n = json.count;
    let involution = if json.inv.len() != n {
        Err(format!("{} entries for {n} elements", json.inv.len()))
    } else if let Some(i) = (0..n).find(|&i| json.inv[i] >= n || json.inv[json.inv[i]] != i) {
        Err(format!("not an involution at {i}"))
    } else {
        Ok(())
    };
    report.check("involution", involution);
    let indices = match json.le.iter().find(|p| p[0] >= n || p[1] >= n) {
        Some(p) => Err(format!("pair {p:?} is out of range")),
        None => Ok(()),
    };
    report.check("indices", indices);
    if report.failed {
        report.check("partial_order", Ok(()));
        report.check("involution_order_reversing", Ok(()));
        report.check("labels", Ok(()));
        return None;
    }
    let pairs: Vec<(usize, usize)> = json.le.iter().map(|&[a, b]| (a, b)).collect();
    let built = SeparationSystem::from_relation(n, json.inv, &pairs);
    let (order, reversing) = match &built {
        Err(
            e @ (SystemError::NotAPoset(..)
            | SystemError::NotReflexive(_)
            | SystemError::NotTransitive(..)),
        ) => (Err(e.to_string()), Ok(())),
        Err(e @ SystemError::InvolutionNotOrderReversing(..)) => (Ok(()), Err(e.to_string())),
        Err(e) => (Err(e.to_string()), Ok(())),
        Ok(_) => (Ok(()), Ok(())),
    };
    report.check("partial_order", order);
    report.check("involution_order_reversing", reversing);
    let labelled = match (built, json.labels) {
        (Ok(sys), Some(l)) => {
            let strings = l.into_iter().map(|l| match l {
                Label::Text(s) => s,
                Label::Int(n) => n.to_string(),
            });
            sys.with_labels(strings.collect()).map_err(|e| e.to_string())
        }
        (built, None) => built.map_err(|e| e.to_string()),
        (Err(e), _) => Err(e.to_string()),
    };
    let labels_check = match &labelled {
        Err(detail) if !report.failed => Err(detail.clone()),
        _ => Ok(()),
    };
    report.check("labels", labels_check);
    labelled.ok()
}

fn system_properties(sys: &SeparationSystem, report: &mut Report) {
    let count = |f: &dyn Fn(usize) -> bool| (0..sys.len()).filter(|&i| f(i)).count();
    report.property("elements", sys.len());
    report.property("separations", sys.separations().len());
    report.property("degenerate", count(&|i| sys.is_degenerate(i)));
    report.property("small", count(&|i| sys.is_small(i)));
    report.property("trivial", count(&|i| sys.is_trivial(i)));
    report.property("nested", sys.is_nested());
    report.property("regular", sys.is_regular());
    report.property("essential", sys.is_essential());
    report.property("tree_set", sys.is_tree_set());
}

fn document_properties(doc: &Document, report: &mut Report) {
    match doc {
        Document::System(sys) => system_properties(sys, report),
        Document::Tree(tree) => {
            report.property("nodes", tree.node_count());
            report.property("edges", tree.edge_count());
            report.property("degree_two_free", (0..tree.node_count()).all(|t| tree.degree(t) != 2));
        }
        Document::OrderTree(tree) => {
            report.property("elements", tree.len());
            report.property("connected", tree.poset().is_connected_order_tree());
        }
        Document::Family(family) => {
            let sys = family.system();
            report.property("ground", family.ground().len());
            report.property("pairs", family.len());
            report.property("nested", sys.is_nested());
            report.property("tree_set", sys.is_tree_set());
            report.property("distinguishes_ground", indistinguishable_pairs(family).is_empty());
        }
        Document::STree(st) => {
            report.property("nodes", st.tree().node_count());
            report.property("over_stars", st.node_images().iter().all(|m| st.host().is_star(m)));
            report.property("irredundant", !is_redundant(st));
            report.property("tight", is_tight(st));
            report.property("essential", is_essential(st));
        }
        Document::Graph(g) => {
            report.property("vertices", g.graph.vertex_count());
            report.property("edges", g.graph.edges().len());
            if let Some(seps) = &g.separations {
                report.check(
                    "separations",
                    separation_system(&g.graph, seps).map(|_| ()).map_err(|e| e.to_string()),
                );
                if let Ok(sys) = separation_system(&g.graph, seps) {
                    report.property("nested", sys.is_nested());
                    report.property("essential", sys.is_essential());
                }
            }
        }
        Document::Decomposition(td) => {
            report.property("parts", td.parts().len());
            report
                .check("adhesion", extract_separations(td).map(|_| ()).map_err(|e| e.to_string()));
        }
    }
}

fn edge_witness(sys: &SeparationSystem, tree: &GraphTree, edge_of: &[usize]) -> Value {
    let map: Map<String, Value> = (0..sys.len())
        .map(|x| {
            let (a, b) = tree.oriented(edge_of[x]);
            (sys.label(x), json!([tree.label(a), tree.label(b)]))
        })
        .collect();
    Value::Object(map)
}

fn embedding_witness(sys: &SeparationSystem, emb: &Embedding) -> Value {
    let f: Map<String, Value> = (0..sys.len())
        .map(|x| {
            let (a, b) = &emb.family.pairs()[x];
            let side = |m: &Members| -> Vec<String> {
                m.iter().map(|&k| emb.family.ground()[k].clone()).collect()
            };
            (sys.label(x), json!([side(a), side(b)]))
        })
        .collect();
    json!({ "f": f })
}

fn not_injective(sys: &SeparationSystem) -> Result<Failure, Failure> {
    let d = directed_embed(sys).map_err(Failure::domain)?;
    let star = maximal_two_star(sys).map_err(Failure::domain)?;
    let collisions: Vec<Value> =
        d.collisions.iter().map(|&(a, b)| json!([sys.label(a), sys.label(b)])).collect();
    Ok(Failure::with_report(
        "not injective: the tree set is not ever-branching",
        json!({
            "error": "not_injective",
            "collisions": collisions,
            "maximal_two_star": star.map(|(r, s)| vec![sys.label(r), sys.label(s)]),
        }),
    ))
}

fn stars_witness(st: &STree) -> Value {
    let map: Map<String, Value> = (0..st.tree().node_count())
        .map(|t| (st.tree().label(t).to_string(), json!(labels(st.host(), st.node_image(t)))))
        .collect();
    json!({ "stars": map })
}

pub fn convert(text: &str, to: Target, orientation: Option<&str>) -> Result<Value, Failure> {
    let doc = input::document(text)?;
    let limits = limits()?;
    match to {
        Target::Tree => {
            let sys = system_of(&doc)?;
            let built = tree_from_treeset(&sys).map_err(Failure::domain)?;
            let witness = json!({ "edge_of": edge_witness(&sys, &built.tree, &built.edge_of) });
            Ok(output(&Document::Tree(built.tree), Some(witness)))
        }
        Target::System => {
            let sys = system_of(&doc)?;
            let witness = match &doc {
                Document::Tree(tree) => {
                    let ets = edge_tree_set(tree);
                    json!({ "oriented_edges": ets.oriented_edges.iter()
                        .map(|&(x, y)| json!([tree.label(x), tree.label(y)])).collect::<Vec<_>>() })
                }
                Document::OrderTree(tree) => {
                    let n = tree.len();
                    let star: Map<String, Value> =
                        (0..n).map(|x| (sys.label(x), json!(sys.label(x + n)))).collect();
                    json!({ "star": star, "orientation": labels(&sys, n..2 * n) })
                }
                Document::Decomposition(td) => {
                    let extracted = extract_separations(td).map_err(Failure::domain)?;
                    stars_witness(&extracted.stree)
                }
                _ => json!({ "identity": true }),
            };
            Ok(output(&Document::System(sys), Some(witness)))
        }
        Target::OrderTree => {
            let path = orientation
                .ok_or_else(|| Failure::Input("--to order-tree needs --orientation".into()))?;
            let sys = system_of(&doc)?;
            let o = input::orientation(path, &sys)?;
            let carved = order_tree_from_oriented(&sys, &o).map_err(Failure::domain)?;
            let canon = canonize(&sys, &o).map_err(Failure::domain)?;
            let map: Map<String, Value> = (0..sys.len())
                .map(|x| (sys.label(x), json!(canon.target.system.label(canon.map[x]))))
                .collect();
            let witness = json!({ "elements": labels(&sys, carved.elements.iter().copied()), "canonization": map });
            Ok(output(&Document::OrderTree(carved.tree), Some(witness)))
        }
        Target::Bipartitions => {
            let sys = system_of(&doc)?;
            let emb = orientation_embed(&sys).map_err(Failure::domain)?;
            let witness = embedding_witness(&sys, &emb);
            Ok(output(&Document::Family(emb.family), Some(witness)))
        }
        Target::BipartitionsSparse => {
            let sys = system_of(&doc)?;
            let d = directed_embed(&sys).map_err(Failure::domain)?;
            match d.embedding {
                Some(emb) => {
                    let witness = embedding_witness(&sys, &emb);
                    Ok(output(&Document::Family(emb.family), Some(witness)))
                }
                None => Err(not_injective(&sys)?),
            }
        }
        Target::Decomposition => {
            let (graph, seps) = match &doc {
                Document::Graph(GraphDoc { graph, separations: Some(seps) }) => {
                    (graph.clone(), seps.clone())
                }
                Document::Decomposition(td) => (
                    td.graph().clone(),
                    extract_separations(td).map_err(Failure::domain)?.separations,
                ),
                other => {
                    return Err(Failure::domain(format!(
                        "cannot convert {} to a decomposition",
                        other.kind()
                    )))
                }
            };
            let rebuilt =
                decomposition_from_treeset(&graph, &seps, &limits).map_err(Failure::domain)?;
            let witness = stars_witness(&rebuilt.stree);
            Ok(output(&Document::Decomposition(rebuilt.decomposition), Some(witness)))
        }
    }
}

fn verdict(theorem: &str, result: Result<Value, Value>) -> Result<Value, Failure> {
    match result {
        Ok(witness) => Ok(json!({ "theorem": theorem, "passed": true, "witness": witness })),
        Err(counterexample) => Err(Failure::with_report(
            format!("{theorem} round trip failed"),
            json!({ "theorem": theorem, "passed": false, "counterexample": counterexample }),
        )),
    }
}

fn error_value(e: impl ToString) -> Value {
    json!({ "error": e.to_string() })
}

pub fn roundtrip(
    text: &str,
    theorem: Theorem,
    orientation: Option<&str>,
) -> Result<Value, Failure> {
    let doc = input::document(text)?;
    let limits = limits()?;
    match theorem {
        Theorem::TreesI => {
            let sys = system_of(&doc)?;
            let result = match verify_identity_isomorphism(&sys) {
                Ok(true) => {
                    let built = tree_from_treeset(&sys).map_err(Failure::domain)?;
                    Ok(json!({ "edge_of": edge_witness(&sys, &built.tree, &built.edge_of) }))
                }
                Ok(false) => Err(json!({ "error": "identity is not an isomorphism" })),
                Err(e) => Err(error_value(e)),
            };
            verdict("trees-i", result)
        }
        Theorem::TreesIi => {
            let Document::Tree(tree) = &doc else {
                return Err(Failure::domain("trees-ii expects a tree"));
            };
            let sys = edge_tree_set(tree).system;
            let result = match verify_node_bijection(tree) {
                Ok(true) => Ok(Value::Object(
                    (0..tree.node_count())
                        .map(|t| {
                            let o = node_orientation(tree, t).expect("node in range");
                            (tree.label(t).to_string(), json!(labels(&sys, o)))
                        })
                        .collect(),
                )),
                Ok(false) => Err(json!({ "error": "t -> O_t is not an isomorphism" })),
                Err(e) => Err(error_value(e)),
            };
            verdict("trees-ii", result)
        }
        Theorem::OrderI => {
            let sys = system_of(&doc)?;
            let orientations = match orientation {
                Some(path) => vec![input::orientation(path, &sys)?],
                None => orient::tree_set_orientations(&sys).map_err(Failure::domain)?,
            };
            let mut maps = Vec::new();
            for o in &orientations {
                match canonize(&sys, o) {
                    Ok(canon) => maps.push(Value::Object(
                        (0..sys.len())
                            .map(|x| (sys.label(x), json!(canon.target.system.label(canon.map[x]))))
                            .collect(),
                    )),
                    Err(e) => {
                        return verdict(
                            "order-i",
                            Err(
                                json!({ "orientation": labels(&sys, o.iter().copied()), "error": e.to_string() }),
                            ),
                        )
                    }
                }
            }
            verdict("order-i", Ok(json!({ "canonizations": maps })))
        }
        Theorem::OrderIi => {
            let Document::OrderTree(tree) = &doc else {
                return Err(Failure::domain("order-ii expects an order tree"));
            };
            let result = match verify_order_roundtrip(tree) {
                Ok(true) => {
                    let ext = treeset_from_order_tree(tree).map_err(Failure::domain)?;
                    Ok(
                        json!({ "orientation": labels(&ext.system, ext.orientation.iter().copied()) }),
                    )
                }
                Ok(false) => Err(json!({ "error": "carved order differs from the input" })),
                Err(e) => Err(error_value(e)),
            };
            verdict("order-ii", result)
        }
        Theorem::Bipartitions => {
            let sys = system_of(&doc)?;
            let identity: Vec<usize> = (0..sys.len()).collect();
            let result = orientation_embed(&sys)
                .and_then(|emb| recover(&emb.family, &sys, &identity).map(|rec| (emb, rec)))
                .map(|(emb, rec)| h_witness(&sys, &emb, &rec.orientations, &rec.h))
                .map_err(error_value);
            verdict("bipartitions", result)
        }
        Theorem::Sparse => {
            let sys = system_of(&doc)?;
            let d = directed_embed(&sys).map_err(Failure::domain)?;
            let Some(emb) = d.embedding else {
                let star = maximal_two_star(&sys).map_err(Failure::domain)?;
                return verdict(
                    "sparse",
                    Err(json!({
                        "error": "tree set is not ever-branching",
                        "maximal_two_star": star.map(|(r, s)| vec![sys.label(r), sys.label(s)]),
                    })),
                );
            };
            let identity: Vec<usize> = (0..sys.len()).collect();
            let result = recover_sparse(&emb.family, &sys, &identity)
                .map(|rec| h_witness(&sys, &emb, &rec.orientations, &rec.h))
                .map_err(error_value);
            verdict("sparse", result)
        }
        Theorem::Stree => {
            let result = match &doc {
                Document::STree(st) => essentialize(st, &StarFamily::of(st))
                    .and_then(|(out, _, _)| treeset_from_stree(&out).map(|span| (out, span)))
                    .map(|(out, span)| {
                        json!({ "stars": stars_witness(&out)["stars"], "image": labels(out.host(), span.image.origin) })
                    })
                    .map_err(error_value),
                _ => {
                    let sys = system_of(&doc)?;
                    stree_roundtrip(&sys, &limits)
                }
            };
            verdict("stree", result)
        }
    }
}

fn h_witness(
    sys: &SeparationSystem,
    emb: &Embedding,
    orientations: &[Members],
    h: &[Option<usize>],
) -> Value {
    let map: Map<String, Value> = emb
        .family
        .ground()
        .iter()
        .zip(h)
        .filter_map(|(x, h)| h.map(|k| (x.clone(), json!(sys.fingerprint(&orientations[k])))))
        .collect();
    json!({ "h": map })
}

fn stree_roundtrip(sys: &SeparationSystem, limits: &orient::Limits) -> Result<Value, Value> {
    let family = StarFamily::new(splitting_sets(sys, limits).map_err(error_value)?);
    let st = stree_from_treeset(sys, &family, limits).map_err(error_value)?;
    let span = treeset_from_stree(&st).map_err(error_value)?;
    let core = regularized_core(sys).map_err(error_value)?;
    if span.image != core {
        return Err(json!({
            "error": "image differs from the regularized essential core",
            "image": labels(sys, span.image.origin.iter().copied()),
            "core": labels(sys, core.origin.iter().copied()),
        }));
    }
    Ok(
        json!({ "stars": stars_witness(&st)["stars"], "image": labels(sys, span.image.origin.iter().copied()) }),
    )
}

fn step_json(host: &SeparationSystem, step: &Step) -> Value {
    match step {
        Step::Pruned { node, kept, removed } => {
            json!({ "step": "pruned", "node": node, "kept": kept, "removed": removed })
        }
        Step::Contracted { node, from, to, removed } => {
            json!({ "step": "contracted", "node": node, "from": from, "to": to, "removed": removed })
        }
        Step::Deleted { tail, head, label } => {
            json!({ "step": "deleted", "tail": tail, "head": head, "label": host.label(*label) })
        }
    }
}

pub fn canonicalize(text: &str) -> Result<Value, Failure> {
    let Document::STree(st) = input::document(text)? else {
        return Err(Failure::domain("canonicalize expects an stree"));
    };
    let (out, core, log) = essentialize(&st, &StarFamily::of(&st)).map_err(Failure::domain)?;
    let log: Vec<Value> = log.iter().map(|s| step_json(st.host(), s)).collect();
    let core: Vec<Vec<String>> =
        core.iter().map(|m| labels(st.host(), m.iter().copied())).collect();
    Ok(output(&Document::STree(out), Some(json!({ "log": log, "family_core": core }))))
}

/// A tree read as a graph, decomposed into the closed neighbourhoods of its
/// vertices.
fn neighbourhood_decomposition(tree: GraphTree) -> TreeDecomposition {
    let graph =
        Graph::new(tree.labels().to_vec(), tree.edges().to_vec()).expect("a tree is simple");
    let parts = (0..tree.node_count())
        .map(|t| tree.neighbours(t).iter().copied().chain([t]).collect())
        .collect();
    TreeDecomposition::new(graph, tree, parts).expect("closed neighbourhoods decompose a tree")
}

pub fn generate(kind: GenKind, seed: u64, max_size: usize) -> Result<Value, Failure> {
    let mut rng = gen::seeded(seed);
    let size = rng.gen_range(1..=max_size.max(1));
    let doc = match kind {
        GenKind::Tree => Document::Tree(gen::random_tree(&mut rng, size)),
        GenKind::System => {
            let shape = NestedShape { nodes: size, small_leaf: 0.2, trivial: rng.gen_range(0..=2) };
            Document::System(gen::random_nested_system(&mut rng, shape).1)
        }
        GenKind::OrderTree => Document::OrderTree(gen::random_order_tree(&mut rng, size)),
        GenKind::Stree => {
            let shape = STreeShape {
                system: NestedShape { nodes: size, small_leaf: 0.2, trivial: rng.gen_range(0..=2) },
                max_nodes: size + 3,
                injections: rng.gen_range(0..=3),
            };
            Document::STree(gen::random_stree(&mut rng, shape).0)
        }
        GenKind::Graph => {
            let td = neighbourhood_decomposition(gen::random_tree(&mut rng, size));
            let separations = extract_separations(&td).map_err(Failure::domain)?.separations;
            Document::Graph(GraphDoc { graph: td.graph().clone(), separations: Some(separations) })
        }
        GenKind::TreeDecomposition => {
            Document::Decomposition(neighbourhood_decomposition(gen::random_tree(&mut rng, size)))
        }
    };
    Ok(output(&doc, None))
}
