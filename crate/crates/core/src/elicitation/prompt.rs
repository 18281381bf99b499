//! Contrastive likelihood prompts.

use super::{EvidenceKind, Observation};

const RESUME_ROLE: &str = "You are a senior technical recruiter with 10+ years of experience evaluating software engineering candidates for companies ranging from FAANG (Google, Meta, Amazon) to high-growth startups. You have personally screened over 5,000 resumes and conducted 1,000+ interviews across all seniority levels.";

const RESUME_RUBRIC: &str = "Provide a score from 0 to 10 where:
10 = Extremely typical. This is exactly what we'd expect from this quality level. Every aspect of the resume aligns perfectly.
8-9 = Quite typical. Strong match with only minor variations or one small unexpected element.
6-7 = Moderately typical. Generally fits but with some notable differences or missing elements.
4-5 = Somewhat typical. Plausible but imperfect match. Several elements don't align.
2-3 = Atypical. Many elements don't fit this quality level. Would be surprising.
0-1 = Completely atypical. Fundamentally inconsistent with this quality level. Would be shocking.";

/// Suffixes appended on retries, each more insistent than the last.
const RETRY_SUFFIXES: [&str; 3] = [
    "Respond with a number only.",
    "Your previous answer could not be read. Reply with a single number between 0 and 10 and nothing else.",
    "IMPORTANT: output exactly one number from 0 to 10, for example 6 or 7.5. No words, no punctuation, no explanation.",
];

/// Typicality prompt for one hypothesized state.
pub fn build_contrastive_prompt(obs: &Observation, state_description: &str) -> String {
    match obs.kind {
        EvidenceKind::Resume | EvidenceKind::Combined => format!(
            "[ROLE]:\n{RESUME_ROLE}\n\n\
             [TASK]:\nYour task is to assess how typical a given resume is for a candidate of a specific quality level.\n\n\
             [STATE CONDITIONING]:\nFor this assessment, ASSUME that the candidate's TRUE quality level is:\n{state_description}\n\n\
             [QUESTION]:\nGiven the assumed quality level above, how TYPICAL or REPRESENTATIVE is the following resume for someone at that level?\n\n\
             [RESUME]:\n{}\n\n\
             [SCORING RUBRIC]:\n{RESUME_RUBRIC}\n\n\
             [OUTPUT FORMAT]:\nProvide ONLY the numeric score (0-10). Do not include explanation or justification.\nScore:",
            obs.text.trim_end()
        ),
        EvidenceKind::PhoneScreen => format!(
            "You are an expert technical recruiter. Assume the candidate's true quality level is: {state_description}\n\n\
             How typical is the following phone screen performance for someone at this quality level?\n\n\
             Phone Screen Notes:\n{}\n\n\
             Score 0-10:\n10 = Extremely typical for this quality level\n0 = Completely atypical\n\n\
             Score:",
            obs.text.trim_end()
        ),
    }
}

/// Single-score quality prompt used by the discriminative baselines.
pub fn build_quality_prompt(obs: &Observation) -> String {
    format!(
        "You are a recruiter. Rate this resume 0-10 for candidate quality where 10=strong hire and 0=clear reject.\n\n{}\n\nScore:",
        obs.text.trim_end()
    )
}

/// The prompt for the given attempt; attempt 0 is the plain prompt.
pub fn with_retry_suffix(prompt: &str, attempt: u32) -> String {
    match attempt {
        0 => prompt.to_string(),
        n => {
            let k = (n as usize - 1).min(RETRY_SUFFIXES.len() - 1);
            format!("{prompt}\n\n{}", RETRY_SUFFIXES[k])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(kind: EvidenceKind) -> Observation {
        Observation { kind, text: "Jane Doe\nEDUCATION ...".into(), features: None, candidate_id: 3 }
    }

    #[test]
    fn resume_prompt_sections_in_order() {
        let p = build_contrastive_prompt(&obs(EvidenceKind::Resume), "Strong Hire (s4): exceptional.");
        let order = [
            "[ROLE]",
            "ASSUME",
            "Strong Hire (s4)",
            "how TYPICAL",
            "Jane Doe",
            "10 = Extremely typical",
            "0-1 = Completely atypical",
            "Provide ONLY the numeric score",
        ];
        let mut at = 0;
        for needle in order {
            let i = p[at..].find(needle).unwrap_or_else(|| panic!("missing or out of order: {needle}"));
            at += i + needle.len();
        }
        assert!(p.ends_with("Score:"));
    }

    #[test]
    fn prompts_are_deterministic() {
        let o = obs(EvidenceKind::Resume);
        assert_eq!(build_contrastive_prompt(&o, "x"), build_contrastive_prompt(&o, "x"));
    }

    #[test]
    fn phone_screen_variant() {
        let p = build_contrastive_prompt(&obs(EvidenceKind::PhoneScreen), "Interview (s3)");
        assert!(p.contains("How typical is the following phone screen performance"));
        assert!(p.contains("Phone Screen Notes:"));
        assert!(!p.contains("[ROLE]"));
    }

    #[test]
    fn retry_suffixes_escalate() {
        let base = "Q";
        assert_eq!(with_retry_suffix(base, 0), "Q");
        let lens: Vec<usize> = (1..=3).map(|a| with_retry_suffix(base, a).len()).collect();
        assert!(lens.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(with_retry_suffix(base, 9), with_retry_suffix(base, 3));
    }
}
