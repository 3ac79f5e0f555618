//! Fixed prompt templates shared by training, inference, and benchmarking.
//!
//! All templates are byte-deterministic: identical inputs produce identical
//! prompt strings, which keeps token counts and benchmark CSVs reproducible.

/// Inference prompt for the functional-token pipeline. Generation starts
/// immediately after the trailing `Response:` anchor.
pub fn functoken_prompt(query: &str) -> String {
    format!(
        "Below is the query from the users, please call the correct function and generate the \
         parameters to call the function. Query: {query} Response:"
    )
}

/// Description block appended after the response in training sequences.
pub fn description_block(description: &str) -> String {
    format!("\n\nFunction description: {description}")
}

/// Full training text for the functional-token pipeline: prompt, response,
/// then the function-description block.
pub fn functoken_training_text(query: &str, response: &str, description_blk: &str) -> String {
    format!("{}{}{}", functoken_prompt(query), response, description_blk)
}

/// Candidate-style prompt for the retrieval-augmented pipeline.
/// `candidates` are full signature/docstring source blocks.
pub fn rag_prompt(candidates: &[String], query: &str) -> String {
    let n = candidates.len();
    let candidate_blocks = candidates.join("\n\n");
    format!(
        "Below, you are presented with {n} candidate functions. Your task is to analyze a \
         specific query to determine which of these functions most appropriately addresses the \
         query. Then, construct the correct function call with all necessary parameters, adhering \
         to proper syntax.\n\
         \n\
         Format for function call:\n\
         \n\
         function_name(param1, param2, ...)\n\
         \n\
         Candidate Functions:\n\
         \n\
         {candidate_blocks}\n\
         \n\
         def irrelevant_function():\n\
         \x20\x20\x20\x20'''If user query is not related to any of the predefined functions, \
         this function will be called. Args: Returns:'''\n\
         \n\
         Query: {query}\n\
         \n\
         Example Scenario:\n\
         \n\
         Query: \"Change user's display mode to dark theme.\"\n\
         \n\
         Given Functions: switch_theme(theme), set_brightness(level), irrelevant_function()\n\
         \n\
         Output: switch_theme(\"dark\")\n\
         \n\
         Your goal is to select the most suitable function out of the {n} candidates and \
         generate an accurate function call that directly addresses the query. Ensure the output \
         is a syntactically valid function call. Only return the function call. Response:"
    )
}

/// Training text for the retrieval-augmented model variant: candidate prompt
/// plus the response. No description block; candidates already carry them.
pub fn rag_training_text(candidates: &[String], query: &str, response: &str) -> String {
    format!("{}{}", rag_prompt(candidates, query), response)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prompts_are_deterministic() {
        let q = "take a photo";
        assert_eq!(functoken_prompt(q), functoken_prompt(q));
        let cands = vec!["def a(): ...".to_string(), "def b(): ...".to_string()];
        assert_eq!(rag_prompt(&cands, q), rag_prompt(&cands, q));
    }

    #[test]
    fn rag_prompt_contains_all_blocks() {
        let cands = vec!["def a(): ...".to_string(); 5];
        let p = rag_prompt(&cands, "do something");
        assert!(p.contains("5 candidate functions"));
        assert!(p.contains("def irrelevant_function()"));
        assert!(p.contains("Query: do something"));
        assert!(p.ends_with("Response:"));
        assert_eq!(p.matches("def a(): ...").count(), 5);
    }

    #[test]
    fn functoken_prompt_ends_with_anchor() {
        assert!(functoken_prompt("q").ends_with(" Response:"));
    }
}
