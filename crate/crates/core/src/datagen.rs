//! Synthetic candidate populations for the four-state hiring problem.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Beta, Normal, Poisson};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Discrete};
use thiserror::Error;

use crate::decision::{DecisionProblem, StateId};
use crate::seed;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("population generator needs a 4-state problem, got {0} states")]
    UnsupportedStates(usize),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniversityTier {
    Elite,
    Top50,
    Average,
    BelowAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degree {
    Bs,
    Ms,
    Phd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompanyPrestige {
    Faang,
    Tier2,
    Startup,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectComplexity {
    Advanced,
    Intermediate,
    Basic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
    NonBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ethnicity {
    White,
    Black,
    Hispanic,
    Asian,
}

impl UniversityTier {
    pub const ALL: [Self; 4] = [Self::Elite, Self::Top50, Self::Average, Self::BelowAverage];
    pub fn key(self) -> &'static str {
        match self {
            Self::Elite => "elite",
            Self::Top50 => "top50",
            Self::Average => "average",
            Self::BelowAverage => "below_average",
        }
    }
}

impl Degree {
    pub const ALL: [Self; 3] = [Self::Bs, Self::Ms, Self::Phd];
    pub fn key(self) -> &'static str {
        match self {
            Self::Bs => "bs",
            Self::Ms => "ms",
            Self::Phd => "phd",
        }
    }
}

impl CompanyPrestige {
    pub const ALL: [Self; 4] = [Self::Faang, Self::Tier2, Self::Startup, Self::Unknown];
}

impl ProjectComplexity {
    pub const ALL: [Self; 3] = [Self::Advanced, Self::Intermediate, Self::Basic];
}

impl Gender {
    pub const ALL: [Self; 3] = [Self::Male, Self::Female, Self::NonBinary];
    pub fn key(self) -> &'static str {
        match self {
            Self::Male => "male",
            Self::Female => "female",
            Self::NonBinary => "non_binary",
        }
    }
}

impl Ethnicity {
    pub const ALL: [Self; 4] = [Self::White, Self::Black, Self::Hispanic, Self::Asian];
    pub fn key(self) -> &'static str {
        match self {
            Self::White => "white",
            Self::Black => "black",
            Self::Hispanic => "hispanic",
            Self::Asian => "asian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demographics {
    pub gender: Gender,
    pub ethnicity: Ethnicity,
}

impl Demographics {
    /// Group keys such as `gender:female` and `ethnicity:black`.
    pub fn group_keys(&self) -> [String; 2] {
        [format!("gender:{}", self.gender.key()), format!("ethnicity:{}", self.ethnicity.key())]
    }
}

impl fmt::Display for Demographics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.gender.key(), self.ethnicity.key())
    }
}

/// Structured resume content. Company prestige and project complexity are
/// rendered into the text but no scorer reads them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResumeFeatures {
    pub university_tier: UniversityTier,
    pub degree: Degree,
    pub gpa: f64,
    pub years: f64,
    pub companies: Vec<CompanyPrestige>,
    pub projects: Vec<ProjectComplexity>,
    pub tech_stack: u32,
}

impl ResumeFeatures {
    /// Tags such as `tier:elite` or `degree:phd` that feature bias offsets key on.
    pub fn tags(&self) -> [String; 2] {
        [format!("tier:{}", self.university_tier.key()), format!("degree:{}", self.degree.key())]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: u64,
    pub true_state: StateId,
    pub features: ResumeFeatures,
    pub demographics: Demographics,
    pub name: String,
    pub resume_text: String,
    pub screen_performance: f64,
}

/// Per-state generating distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateProfile {
    pub tier: [f64; 4],
    pub degree: [f64; 3],
    /// Beta shape and the GPA interval the draw is rescaled onto.
    pub gpa: (f64, f64, f64, f64),
    /// Truncated normal `(mean, sd, min, max)`.
    pub years: (f64, f64, f64, f64),
    pub company: [f64; 4],
    pub projects_lambda: f64,
    pub complexity: [f64; 3],
    /// Tech stack size is `Poisson(lambda) + 2`.
    pub tech_lambda: f64,
    /// Screen performance is `10 * Beta(a, b)`.
    pub screen: (f64, f64),
}

pub const PROFILES: [StateProfile; 4] = [
    StateProfile {
        tier: [0.05, 0.10, 0.30, 0.55],
        degree: [0.75, 0.20, 0.05],
        gpa: (2.0, 5.0, 2.0, 3.5),
        years: (0.5, 0.3, 0.0, 2.0),
        company: [0.05, 0.15, 0.30, 0.50],
        projects_lambda: 1.0,
        complexity: [0.10, 0.30, 0.60],
        tech_lambda: 3.0,
        screen: (2.0, 8.0),
    },
    StateProfile {
        tier: [0.10, 0.25, 0.45, 0.20],
        degree: [0.65, 0.30, 0.05],
        gpa: (3.0, 3.0, 2.5, 3.8),
        years: (2.0, 1.0, 1.0, 5.0),
        company: [0.10, 0.30, 0.40, 0.20],
        projects_lambda: 2.0,
        complexity: [0.20, 0.50, 0.30],
        tech_lambda: 6.0,
        screen: (5.0, 5.0),
    },
    StateProfile {
        tier: [0.20, 0.50, 0.25, 0.05],
        degree: [0.50, 0.40, 0.10],
        gpa: (5.0, 2.0, 3.0, 4.0),
        years: (4.0, 1.5, 2.0, 8.0),
        company: [0.25, 0.45, 0.25, 0.05],
        projects_lambda: 4.0,
        complexity: [0.40, 0.45, 0.15],
        tech_lambda: 10.0,
        screen: (7.0, 3.0),
    },
    StateProfile {
        tier: [0.80, 0.15, 0.05, 0.00],
        degree: [0.30, 0.30, 0.40],
        gpa: (8.0, 1.0, 3.5, 4.0),
        years: (7.0, 2.0, 5.0, 15.0),
        company: [0.60, 0.30, 0.10, 0.00],
        projects_lambda: 6.0,
        complexity: [0.70, 0.25, 0.05],
        tech_lambda: 15.0,
        screen: (9.0, 1.0),
    },
];

pub const GENDER_MARGINAL: [f64; 3] = [0.512, 0.438, 0.05];
pub const ETHNICITY_MARGINAL: [f64; 4] = [0.382, 0.168, 0.215, 0.235];

fn categorical<T: Copy, R: Rng + ?Sized>(items: &[T], weights: &[f64], rng: &mut R) -> T {
    let idx = WeightedIndex::new(weights).expect("static weights");
    items[idx.sample(rng)]
}

fn profile(state: StateId) -> &'static StateProfile {
    &PROFILES[state.0]
}

/// Rejection sampling from the parent normal.
fn truncated_normal<R: Rng + ?Sized>((mu, sd, lo, hi): (f64, f64, f64, f64), rng: &mut R) -> f64 {
    let normal = Normal::new(mu, sd).expect("static normal");
    loop {
        let x = normal.sample(rng);
        if (lo..=hi).contains(&x) {
            return x;
        }
    }
}

fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    Poisson::new(lambda).expect("static lambda").sample(rng) as u32
}

/// `10 * Beta(a, b)` for the state's screen profile.
pub fn sample_screen_performance<R: Rng + ?Sized>(state: StateId, rng: &mut R) -> f64 {
    let (a, b) = profile(state).screen;
    10.0 * Beta::new(a, b).expect("static beta").sample(rng)
}

pub fn sample_features<R: Rng + ?Sized>(state: StateId, rng: &mut R) -> ResumeFeatures {
    let p = profile(state);
    let university_tier = categorical(&UniversityTier::ALL, &p.tier, rng);
    let degree = categorical(&Degree::ALL, &p.degree, rng);
    let (a, b, lo, hi) = p.gpa;
    let gpa = lo + (hi - lo) * Beta::new(a, b).expect("static beta").sample(rng);
    let years = truncated_normal(p.years, rng);
    // One employer per started 2.5 years, at most four.
    let n_companies = (1 + (years / 2.5) as usize).min(4);
    let companies = (0..n_companies).map(|_| categorical(&CompanyPrestige::ALL, &p.company, rng)).collect();
    let n_projects = poisson(p.projects_lambda, rng);
    let projects = (0..n_projects)
        .map(|_| categorical(&ProjectComplexity::ALL, &p.complexity, rng))
        .collect();
    let tech_stack = poisson(p.tech_lambda, rng) + 2;
    ResumeFeatures { university_tier, degree, gpa, years, companies, projects, tech_stack }
}

pub fn sample_demographics<R: Rng + ?Sized>(rng: &mut R) -> Demographics {
    Demographics {
        gender: categorical(&Gender::ALL, &GENDER_MARGINAL, rng),
        ethnicity: categorical(&Ethnicity::ALL, &ETHNICITY_MARGINAL, rng),
    }
}

struct NameTable {
    first: Vec<(String, String, String)>,
    last: Vec<(String, String)>,
}

fn names() -> &'static NameTable {
    static TABLE: OnceLock<NameTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut first = Vec::new();
        let mut last = Vec::new();
        for line in include_str!("../data/names.csv").lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            match f.as_slice() {
                ["first", g, e, n] => first.push((g.to_string(), e.to_string(), n.to_string())),
                ["last", _, e, n] => last.push((e.to_string(), n.to_string())),
                _ => panic!("malformed name record: {line}"),
            }
        }
        NameTable { first, last }
    })
}

/// Draws a full name consistent with the demographics from the bundled list.
pub fn sample_name<R: Rng + ?Sized>(demo: &Demographics, rng: &mut R) -> String {
    let t = names();
    let firsts: Vec<&str> = t
        .first
        .iter()
        .filter(|(g, e, _)| {
            g == demo.gender.key() && (e == "any" || e == demo.ethnicity.key())
        })
        .map(|(_, _, n)| n.as_str())
        .collect();
    let lasts: Vec<&str> =
        t.last.iter().filter(|(e, _)| e == demo.ethnicity.key()).map(|(_, n)| n.as_str()).collect();
    let first = firsts[rng.random_range(0..firsts.len())];
    let last = lasts[rng.random_range(0..lasts.len())];
    format!("{first} {last}")
}

/// Population of `n` candidates. Candidate `i` uses its own stream derived
/// from `(seed, i)`, so any subset can be regenerated independently.
pub fn sample_population(n: usize, problem: &DecisionProblem, seed: u64) -> Result<Vec<Candidate>, DatagenError> {
    if problem.n_states() != PROFILES.len() {
        return Err(DatagenError::UnsupportedStates(problem.n_states()));
    }
    let prior = problem.prior().probs().to_vec();
    let states: Vec<StateId> = (0..prior.len()).map(StateId).collect();
    Ok(crate::par::map_indexed(n, |i| {
        let id = i as u64;
        let mut rng = seed::rng(&[seed, id, seed::label("candidate")]);
        let true_state = categorical(&states, &prior, &mut rng);
        let features = sample_features(true_state, &mut rng);
        let demographics = sample_demographics(&mut rng);
        let name = sample_name(&demographics, &mut rng);
        let screen_performance = sample_screen_performance(true_state, &mut rng);
        let resume_text = render_resume(&features, &name, id);
        Candidate { id, true_state, features, demographics, name, resume_text, screen_performance }
    }))
}

fn post_mean(lik: [f64; 4]) -> f64 {
    let z: f64 = lik.iter().sum();
    if z.is_nan() || z <= 0.0 || !z.is_finite() {
        return 1.5;
    }
    lik.iter().enumerate().map(|(s, l)| s as f64 * l / z).sum()
}

/// Per-feature evidence positions on the ordinal state scale `[0, 3]`.
///
/// Each entry is the posterior-mean state index under a uniform prior given
/// that one feature alone, for tier, degree, GPA, years, project count and
/// tech-stack size in that order.
pub fn feature_positions(f: &ResumeFeatures) -> [f64; 6] {
    use statrs::distribution as sd;
    let tier_idx = UniversityTier::ALL.iter().position(|t| *t == f.university_tier).unwrap();
    let deg_idx = Degree::ALL.iter().position(|d| *d == f.degree).unwrap();
    let by_state = |g: &dyn Fn(&StateProfile) -> f64| -> [f64; 4] {
        [g(&PROFILES[0]), g(&PROFILES[1]), g(&PROFILES[2]), g(&PROFILES[3])]
    };
    let gpa = by_state(&|p| {
        let (a, b, lo, hi) = p.gpa;
        if f.gpa < lo || f.gpa > hi {
            return 0.0;
        }
        let x = ((f.gpa - lo) / (hi - lo)).clamp(1e-12, 1.0 - 1e-12);
        sd::Beta::new(a, b).unwrap().pdf(x) / (hi - lo)
    });
    let years = by_state(&|p| {
        let (mu, s, lo, hi) = p.years;
        if f.years < lo || f.years > hi {
            return 0.0;
        }
        let n = sd::Normal::new(mu, s).unwrap();
        n.pdf(f.years) / (n.cdf(hi) - n.cdf(lo))
    });
    let projects = by_state(&|p| sd::Poisson::new(p.projects_lambda).unwrap().pmf(f.projects.len() as u64));
    let tech = by_state(&|p| {
        let k = f.tech_stack.saturating_sub(2) as u64;
        sd::Poisson::new(p.tech_lambda).unwrap().pmf(k)
    });
    [
        post_mean(by_state(&|p| p.tier[tier_idx])),
        post_mean(by_state(&|p| p.degree[deg_idx])),
        post_mean(gpa),
        post_mean(years),
        post_mean(projects),
        post_mean(tech),
    ]
}

// ---------------------------------------------------------------- rendering

const MAJORS: [&str; 4] = ["Computer Science", "Software Engineering", "Computer Engineering", "Information Systems"];

const UNIVERSITIES: [[&str; 3]; 4] = [
    ["Stanford University", "Massachusetts Institute of Technology", "Carnegie Mellon University"],
    ["University of Washington", "Georgia Institute of Technology", "University of Michigan"],
    ["Oregon State University", "University of Kansas", "San Jose State University"],
    ["Midland Technical College", "Lakeshore State College", "Western Plains University"],
];

const EMPLOYERS: [[&str; 3]; 4] = [
    ["Google", "Amazon", "Meta"],
    ["Salesforce", "Atlassian", "Adobe"],
    ["Brightloop", "Quillstack", "Nimbus Labs"],
    ["Regional Data Services", "Coastal IT Solutions", "Harbor Systems Group"],
];

const TECH: [&str; 40] = [
    "Python", "Java", "JavaScript", "TypeScript", "Go", "Rust", "C++", "C#", "SQL", "Kotlin",
    "React", "Node.js", "Django", "Flask", "Spring Boot", "GraphQL", "PostgreSQL", "MySQL", "Redis", "MongoDB",
    "Kafka", "Docker", "Kubernetes", "Terraform", "AWS", "GCP", "Azure", "Linux", "Git", "Jenkins",
    "GitHub Actions", "gRPC", "Elasticsearch", "Spark", "Airflow", "Pandas", "PyTorch", "Prometheus", "Grafana", "Nginx",
];

const BULLETS: [&str; 12] = [
    "Built and maintained backend services that handled customer-facing traffic and internal reporting needs.",
    "Worked with product managers and designers to scope features and ship them on a regular release cadence.",
    "Wrote unit and integration tests and helped keep the continuous integration pipeline reliable.",
    "Investigated production incidents, wrote postmortems and followed up on the resulting action items.",
    "Refactored legacy modules to reduce duplicated logic and make future changes easier to review.",
    "Reviewed pull requests from teammates and contributed to shared coding guidelines for the team.",
    "Improved query performance on several slow endpoints by adding indexes and caching hot paths.",
    "Automated routine deployment steps, which cut manual release work for the whole group.",
    "Migrated a set of internal tools to a containerized setup running on a managed cluster.",
    "Documented service interfaces and onboarding steps for new engineers joining the team.",
    "Participated in on-call rotation and helped triage bugs reported by support staff.",
    "Prototyped new features behind flags and measured their impact before a wider rollout.",
];

const PROJECT_TOPICS: [&str; 8] = [
    "a task tracker web application",
    "a command-line tool for parsing log files",
    "a small distributed key-value store",
    "a recommendation service for a reading list site",
    "a real-time chat server",
    "a data pipeline for public transit feeds",
    "a compiler front end for a toy language",
    "a mobile app for tracking personal budgets",
];

const FILLER: [&str; 16] = [
    "Comfortable working in agile teams and communicating progress clearly to both technical and non-technical colleagues.",
    "Interested in developer tooling, code quality and building software that is easy for other people to maintain.",
    "Enjoys mentoring peers, pairing on hard problems and writing clear documentation for shared systems.",
    "Available for full-time roles and open to hybrid or remote arrangements depending on team needs.",
    "Outside of work, volunteers with a local coding club that introduces high school students to programming.",
    "Regularly reads engineering blogs and conference talks to keep up with changes in the wider ecosystem.",
    "Prefers small, well-tested changes and believes careful code review is one of the best ways to learn.",
    "References and code samples are available on request.",
    "Has presented short internal talks on debugging techniques and on writing useful commit messages.",
    "Likes turning vague requirements into small written plans that the rest of the team can comment on.",
    "Keeps a personal notes repository of lessons learned from incidents, code reviews and side projects.",
    "Has contributed small bug fixes and documentation improvements to open-source libraries used at work.",
    "Values predictable delivery and tries to flag risks early instead of surprising the team late in a sprint.",
    "Speaks English fluently and is comfortable collaborating with colleagues across several time zones.",
    "Interested in accessibility and in making internal tools pleasant for the people who rely on them daily.",
    "Looking for a team with thoughtful engineering practices and room to take on more responsibility over time.",
];

const SUMMARIES: [&str; 3] = [
    "Software engineer with {years} of professional experience and a {degree} in {major}. Looking for a role where I can keep growing as an engineer and contribute to a product team.",
    "Developer focused on practical, maintainable software. {years} of hands-on experience after completing a {degree} in {major}, with a habit of learning new tools quickly.",
    "Engineer with a {degree} in {major} and {years} of industry experience building and operating software. Motivated by clear problems and collaborative teams.",
];

fn pick<'a>(items: &'a [&'a str], key: u64, salt: u64) -> &'a str {
    items[(seed::derive(&[key, salt]) % items.len() as u64) as usize]
}

fn years_phrase(years: f64) -> String {
    if years < 1.0 {
        let months = ((years * 12.0).round() as u32).max(1);
        format!("{months} month{}", if months == 1 { "" } else { "s" })
    } else {
        format!("{years:.1} years")
    }
}

fn degree_name(d: Degree) -> &'static str {
    match d {
        Degree::Bs => "Bachelor of Science",
        Degree::Ms => "Master of Science",
        Degree::Phd => "Ph.D.",
    }
}

fn complexity_phrase(c: ProjectComplexity) -> &'static str {
    match c {
        ProjectComplexity::Advanced => "a substantial system with several interacting components",
        ProjectComplexity::Intermediate => "a moderately sized application with a persistent data layer",
        ProjectComplexity::Basic => "a small exercise project",
    }
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

const MIN_WORDS: usize = 300;
const MAX_WORDS: usize = 500;
const REFERENCE_YEAR: i32 = 2024;

/// Plain-text resume from structured features. `style` picks among template
/// variants and employer or project wording; candidates use their id.
pub fn render_resume(f: &ResumeFeatures, name: &str, style: u64) -> String {
    let tier_idx = UniversityTier::ALL.iter().position(|t| *t == f.university_tier).unwrap();
    let major = pick(&MAJORS, style, 1);
    let degree = degree_name(f.degree);
    let years = years_phrase(f.years);

    let mut head = format!("{name}\nSoftware Engineer | Email and phone available on request\n\n");
    let summary = pick(&SUMMARIES, style, 2)
        .replace("{years}", &years)
        .replace("{degree}", degree)
        .replace("{major}", major);
    head.push_str(&format!("SUMMARY\n{summary}\n\n"));

    let grad_year = REFERENCE_YEAR - f.years.ceil() as i32;
    let mut education = format!(
        "EDUCATION\n{degree} in {major}, {}, {grad_year}\nGPA: {:.2} / 4.00\nRelevant coursework: data structures, algorithms, operating systems, databases and computer networks.\n\n",
        pick(&UNIVERSITIES[tier_idx], style, 3),
        f.gpa,
    );
    if f.degree == Degree::Phd {
        education.insert_str(education.len() - 2, "\nDissertation work on systems and software reliability.");
    }

    // Split the experience evenly across employers, most recent first.
    let mut experience = String::from("EXPERIENCE\n");
    let per = f.years / f.companies.len() as f64;
    let bullets_each = if f.companies.len() > 2 { 2 } else { 3 };
    for (i, c) in f.companies.iter().enumerate() {
        let prestige = CompanyPrestige::ALL.iter().position(|p| p == c).unwrap();
        let employer = pick(&EMPLOYERS[prestige], style, 10 + i as u64);
        let end = REFERENCE_YEAR as f64 - per * i as f64;
        let start = end - per;
        let end_label = if i == 0 { "Present".to_string() } else { format!("{}", end.floor() as i32) };
        let role = if i == 0 && f.years >= 5.0 { "Senior Software Engineer" } else { "Software Engineer" };
        experience.push_str(&format!("{role}, {employer} | {} to {end_label}\n", start.floor() as i32));
        for j in 0..bullets_each {
            let b = BULLETS[(seed::derive(&[style, 20 + i as u64]) as usize + j * 5) % BULLETS.len()];
            experience.push_str(&format!("- {b}\n"));
        }
    }
    experience.push('\n');

    let mut projects = String::from("PROJECTS\n");
    if f.projects.is_empty() {
        projects.push_str("No independent projects listed.\n");
    }
    const SHOWN: usize = 4;
    for (i, c) in f.projects.iter().take(SHOWN).enumerate() {
        let topic = PROJECT_TOPICS[(seed::derive(&[style, 30]) as usize + i * 3) % PROJECT_TOPICS.len()];
        projects.push_str(&format!("- Built {topic}, {}.\n", complexity_phrase(*c)));
    }
    if f.projects.len() > SHOWN {
        projects.push_str(&format!("- {} further personal and coursework projects.\n", f.projects.len() - SHOWN));
    }
    projects.push('\n');

    let n_tech = (f.tech_stack as usize).min(TECH.len());
    let offset = (seed::derive(&[style, 40]) % TECH.len() as u64) as usize;
    let listed: Vec<&str> = (0..n_tech).map(|i| TECH[(offset + i) % TECH.len()]).collect();
    let mut skills = format!("SKILLS\n{}", listed.join(", "));
    if f.tech_stack as usize > TECH.len() {
        skills.push_str(&format!(", plus {} other tools", f.tech_stack as usize - TECH.len()));
    }
    skills.push('\n');

    let mut text = format!("{head}{education}{experience}{projects}{skills}");
    let mut extra = Vec::new();
    let start = (seed::derive(&[style, 50]) % FILLER.len() as u64) as usize;
    for k in 0..FILLER.len() {
        if word_count(&text) + word_count(&extra.join(" ")) >= MIN_WORDS {
            break;
        }
        extra.push(FILLER[(start + k) % FILLER.len()]);
    }
    if !extra.is_empty() {
        text.push_str(&format!("\nADDITIONAL INFORMATION\n{}\n", extra.join(" ")));
    }
    debug_assert!(word_count(&text) <= MAX_WORDS, "resume too long: {}", word_count(&text));
    text
}

/// Phone screen notes rendered from the latent performance score.
pub fn render_screen_notes(performance: f64) -> String {
    let band = match performance {
        p if p < 3.0 => "Struggled with basic coding questions and could not explain past work in depth.",
        p if p < 5.0 => "Answered some questions but needed frequent hints; explanations were shallow in places.",
        p if p < 7.0 => "Solid on fundamentals with a few gaps; communicated reasoning reasonably well.",
        p if p < 9.0 => "Strong problem solving and clear communication; handled follow-up questions well.",
        _ => "Exceptional depth across every topic; designed a clean solution quickly and discussed trade-offs.",
    };
    format!("Overall screen performance: {performance:.1} / 10. {band}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatagenError + '_ {
    move |source| DatagenError::Io { path: path.to_path_buf(), source }
}

/// Writes one JSON record per candidate.
pub fn write_population(path: &Path, candidates: &[Candidate]) -> Result<(), DatagenError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for c in candidates {
        let line = serde_json::to_string(c).expect("candidate serializes");
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_population(path: &Path) -> Result<Vec<Candidate>, DatagenError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let c = serde_json::from_str(&line)
            .map_err(|source| DatagenError::Parse { path: path.to_path_buf(), line: i + 1, source })?;
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::hiring_problem;

    #[test]
    fn single_candidate_is_repeatable() {
        let p = hiring_problem();
        let a = sample_population(1, &p, 9).unwrap();
        let b = sample_population(1, &p, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
        assert!(!a[0].resume_text.is_empty() && !a[0].name.is_empty());
    }

    #[test]
    fn rejects_other_state_counts() {
        let p = crate::decision::binary_hiring_problem(1.0, 1.0, 0.5).unwrap();
        assert!(matches!(sample_population(3, &p, 0), Err(DatagenError::UnsupportedStates(2))));
    }

    #[test]
    fn names_follow_demographics() {
        let mut rng = seed::rng(&[1]);
        for g in Gender::ALL {
            for e in Ethnicity::ALL {
                let d = Demographics { gender: g, ethnicity: e };
                let n = sample_name(&d, &mut rng);
                let last = n.split(' ').nth(1).unwrap();
                assert!(names().last.iter().any(|(le, ln)| ln == last && le == e.key()), "{n} for {d}");
            }
        }
    }

    #[test]
    fn feature_positions_are_ordered_for_extremes() {
        let weak = ResumeFeatures {
            university_tier: UniversityTier::BelowAverage,
            degree: Degree::Bs,
            gpa: 2.3,
            years: 0.4,
            companies: vec![CompanyPrestige::Unknown],
            projects: vec![],
            tech_stack: 4,
        };
        let strong = ResumeFeatures {
            university_tier: UniversityTier::Elite,
            degree: Degree::Phd,
            gpa: 3.95,
            years: 8.0,
            companies: vec![CompanyPrestige::Faang; 4],
            projects: vec![ProjectComplexity::Advanced; 6],
            tech_stack: 17,
        };
        let w = feature_positions(&weak);
        let s = feature_positions(&strong);
        for k in 0..6 {
            assert!(w[k] < s[k], "feature {k}: {} vs {}", w[k], s[k]);
            assert!((0.0..=3.0).contains(&w[k]) && (0.0..=3.0).contains(&s[k]));
        }
    }

    #[test]
    fn screen_notes_mention_score() {
        assert!(render_screen_notes(7.25).contains("7.2 / 10") || render_screen_notes(7.25).contains("7.3 / 10"));
    }
}
