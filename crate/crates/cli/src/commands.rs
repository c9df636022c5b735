//! One function per subcommand. Each returns the structured verdict and
//! the process exit code, narrating its progress on standard error.

use fincat::{
    check_chain, check_fine_tuning_theorem, check_prompt_theorem, classify_functor, load_any,
    load_category, load_chain, load_task, ExtensionError, FormatError, LoadedInput,
    MultimodalError, PresheafError, PromptVerdict, UnsolvableWitness, YonedaError,
};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::Path;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

pub fn format_failure(err: &FormatError) -> (Value, u8) {
    if err.is_input_error() {
        eprintln!("input error: {err}");
        (
            json!({"status": "input-error", "detail": err.to_string()}),
            EXIT_INPUT,
        )
    } else {
        eprintln!("invalid content: {err}");
        (
            json!({"status": "invalid", "witness": err.to_string()}),
            EXIT_FAILED,
        )
    }
}

fn budget_verdict(required: u128) -> (Value, u8) {
    eprintln!("enumeration budget exceeded: {required} families required");
    (
        json!({"status": "budget-exceeded", "required_families": required.to_string()}),
        EXIT_BUDGET,
    )
}

fn engine_failure(detail: String) -> (Value, u8) {
    eprintln!("check failed: {detail}");
    (
        json!({"status": "failed", "witness": detail}),
        EXIT_FAILED,
    )
}

fn yoneda_budget(err: &YonedaError) -> Option<u128> {
    match err {
        YonedaError::Presheaf(PresheafError::EnumerationBudgetExceeded { required }) => {
            Some(*required)
        }
        _ => None,
    }
}

pub fn cmd_validate(path: &Path) -> (Value, u8) {
    eprintln!("checking {}", path.display());
    match load_any(path) {
        Ok(input) => {
            eprintln!("valid {} file", input.kind());
            (
                json!({"status": "valid", "kind": input.kind(), "details": describe(&input)}),
                EXIT_OK,
            )
        }
        Err(err) => format_failure(&err),
    }
}

fn describe(input: &LoadedInput) -> Value {
    match input {
        LoadedInput::Category(c) => json!({
            "objects": c.object_count(),
            "morphisms": c.morphism_count(),
        }),
        LoadedInput::Functor(f) => {
            let class = classify_functor(f);
            json!({
                "source_objects": f.source().object_count(),
                "target_objects": f.target().object_count(),
                "full": class.full,
                "embedding": class.embedding,
            })
        }
        LoadedInput::Task(t) => {
            let values: BTreeMap<String, usize> = t
                .base()
                .objects()
                .iter()
                .map(|x| {
                    let size = t.value(x).map(|v| v.len()).unwrap_or(0);
                    (x.as_str().to_string(), size)
                })
                .collect();
            json!({
                "variance": t.variance(),
                "value_sizes": values,
            })
        }
        LoadedInput::Chain(spec) => json!({
            "categories": spec.categories().iter().map(|c| c.object_count()).collect::<Vec<_>>(),
            "links": spec.links().len(),
            "training_subset": spec.training_subset().map(|s| s.len()),
        }),
        LoadedInput::WeightedGraph(g) => json!({
            "nodes": g.nodes().len(),
            "allow_self_loops": g.allow_self_loops(),
        }),
        LoadedInput::MaskSpec(m) => json!({
            "splits": m.splits().len(),
        }),
        LoadedInput::MarkovLm(lm) => json!({
            "tokens": lm.tokens().len(),
            "window": lm.window(),
            "transitions": lm.transition_count(),
        }),
    }
}

/// Loads a category and a task and insists that the task really lives on
/// that category.
fn load_pair(
    category_path: &Path,
    task_path: &Path,
) -> Result<(fincat::FinCategory, fincat::SetFunctor), (Value, u8)> {
    let category = load_category(category_path).map_err(|e| format_failure(&e))?;
    let task = load_task(task_path).map_err(|e| format_failure(&e))?;
    if task.base().to_spec() != category.to_spec() {
        eprintln!("input error: the task's base category differs from the category argument");
        return Err((
            json!({
                "status": "input-error",
                "detail": "task base category does not match the category argument",
            }),
            EXIT_INPUT,
        ));
    }
    Ok((category, task))
}

pub fn cmd_prompt(category_path: &Path, task_path: &Path, budget: u64) -> (Value, u8) {
    let (category, task) = match load_pair(category_path, task_path) {
        Ok(pair) => pair,
        Err(outcome) => return outcome,
    };
    eprintln!(
        "deciding representability over {} candidate prompts",
        category.object_count()
    );
    match check_prompt_theorem(&category, &task, budget) {
        Ok(PromptVerdict::Solvable { prompt, iso }) => {
            eprintln!("solvable: prompt {prompt} represents the task");
            (
                json!({
                    "status": "solvable",
                    "prompt": prompt.as_str(),
                    "isomorphism": iso.to_tables(),
                }),
                EXIT_OK,
            )
        }
        Ok(PromptVerdict::Unsolvable { witnesses }) => {
            eprintln!("unsolvable: no prompt represents the task");
            (
                json!({
                    "status": "unsolvable",
                    "witnesses": witness_table(&witnesses),
                }),
                EXIT_FAILED,
            )
        }
        Err(YonedaError::TaskNotContravariant) => {
            eprintln!("input error: prompt checking needs a contravariant task");
            (
                json!({
                    "status": "input-error",
                    "detail": "task must be contravariant for prompt checking",
                }),
                EXIT_INPUT,
            )
        }
        Err(err) => match yoneda_budget(&err) {
            Some(required) => budget_verdict(required),
            None => engine_failure(err.to_string()),
        },
    }
}

pub fn witness_table(
    witnesses: &BTreeMap<fincat::ObjectId, UnsolvableWitness>,
) -> BTreeMap<String, Value> {
    witnesses
        .iter()
        .map(|(prompt, w)| {
            let value = match w {
                UnsolvableWitness::CardinalityMismatch {
                    object,
                    task_size,
                    prompt_size,
                } => json!({
                    "kind": "cardinality-mismatch",
                    "object": object.as_str(),
                    "task_size": task_size,
                    "prompt_size": prompt_size,
                }),
                UnsolvableWitness::NoNaturalIso => json!({
                    "kind": "no-natural-isomorphism",
                }),
            };
            (prompt.as_str().to_string(), value)
        })
        .collect()
}

pub fn cmd_finetune(category_path: &Path, task_path: &Path) -> (Value, u8) {
    let (category, task) = match load_pair(category_path, task_path) {
        Ok(pair) => pair,
        Err(outcome) => return outcome,
    };
    eprintln!(
        "extending the task along the embedding and evaluating at all {} objects",
        category.object_count()
    );
    match check_fine_tuning_theorem(&category, &task) {
        Ok(report) => {
            let bijections: BTreeMap<String, BTreeMap<String, String>> = report
                .bijections()
                .iter()
                .map(|(x, b)| (x.as_str().to_string(), b.to_name_map()))
                .collect();
            eprintln!("solved: extension matches the task at every object");
            (
                json!({"status": "solved", "bijections": bijections}),
                EXIT_OK,
            )
        }
        Err(ExtensionError::WrongVariance { .. }) => {
            eprintln!("input error: fine-tuning checks need a covariant task");
            (
                json!({
                    "status": "input-error",
                    "detail": "task must be covariant for fine-tuning checks",
                }),
                EXIT_INPUT,
            )
        }
        Err(ExtensionError::Presheaf(PresheafError::EnumerationBudgetExceeded { required })) => {
            budget_verdict(required)
        }
        Err(ExtensionError::Yoneda(err)) => match yoneda_budget(&err) {
            Some(required) => budget_verdict(required),
            None => engine_failure(err.to_string()),
        },
        Err(err) => engine_failure(err.to_string()),
    }
}

pub fn cmd_chain(chain_path: &Path, budget: u64) -> (Value, u8) {
    let spec = match load_chain(chain_path) {
        Ok(spec) => spec,
        Err(err) => return format_failure(&err),
    };
    eprintln!(
        "verifying a {}-link chain over categories of sizes {:?}",
        spec.links().len(),
        spec.categories()
            .iter()
            .map(|c| c.object_count())
            .collect::<Vec<_>>()
    );
    match check_chain(&spec, budget) {
        Ok(report) => {
            eprintln!("preserved: structure survives to the final category");
            (chain_verdict(&report), EXIT_OK)
        }
        Err(MultimodalError::ChainMismatch { link, reason }) => {
            eprintln!("violated at link {link}: {reason}");
            (
                json!({"status": "violated", "link": link, "witness": reason}),
                EXIT_FAILED,
            )
        }
        Err(MultimodalError::Presheaf(PresheafError::EnumerationBudgetExceeded { required })) => {
            budget_verdict(required)
        }
        Err(MultimodalError::Yoneda(err)) => match yoneda_budget(&err) {
            Some(required) => budget_verdict(required),
            None => engine_failure(err.to_string()),
        },
        Err(err) => engine_failure(err.to_string()),
    }
}

pub fn chain_verdict(report: &fincat::ChainReport) -> Value {
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|p| {
            json!({
                "source": p.source.as_str(),
                "target": p.target.as_str(),
                "hom_size": p.hom.len(),
                "transformation_count": p.transformation_count,
            })
        })
        .collect();
    let decode: BTreeMap<String, String> = report
        .decode
        .iter()
        .map(|(x, z)| (x.as_str().to_string(), z.as_str().to_string()))
        .collect();
    json!({
        "status": "preserved",
        "image_objects": report
            .image
            .subcategory
            .objects()
            .iter()
            .map(|o| o.as_str())
            .collect::<Vec<_>>(),
        "pairs": pairs,
        "decode": decode,
        "novel_decodes": report
            .novel_decodes
            .as_ref()
            .map(|v| v.iter().map(|o| o.as_str()).collect::<Vec<_>>()),
    })
}
