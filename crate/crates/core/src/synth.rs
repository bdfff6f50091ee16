//! Seeded synthetic corpora with planted experts, used for end-to-end
//! experiments where the right answer is known.
//!
//! Each topic has a two-word query. Its planted experts write many papers
//! containing both query words, mostly with each other, and those papers
//! attract most of the topical citations. "Dabblers" write a few matching
//! papers that nobody cites in particular; everyone else writes background
//! papers on random topics.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{format_publication, AuthorRecord, Publication, VenueKind};
use crate::error::{Error, Result};

const TOPICS: [[&str; 8]; 8] = [
    ["neural", "network", "learning", "deep", "training", "gradient", "layer", "activation"],
    ["database", "transaction", "index", "query", "storage", "relational", "join", "optimizer"],
    ["graph", "mining", "community", "subgraph", "pattern", "frequent", "vertex", "clustering"],
    ["retrieval", "ranking", "document", "relevance", "search", "feedback", "term", "corpus"],
    ["image", "segmentation", "object", "recognition", "pixel", "camera", "feature", "detection"],
    ["distributed", "consensus", "replication", "fault", "tolerance", "cluster", "membership", "scheduling"],
    ["cryptographic", "encryption", "signature", "key", "cipher", "protocol", "attack", "proof"],
    ["compiler", "register", "optimization", "allocation", "parsing", "loop", "code", "static"],
];

const FILLER: [&str; 16] = [
    "approach", "method", "analysis", "efficient", "novel", "framework", "study", "system", "model", "evaluation",
    "results", "towards", "scalable", "using", "based", "improved",
];

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub seed: u64,
    pub num_authors: usize,
    pub num_publications: usize,
    pub num_topics: usize,
    pub experts_per_topic: usize,
    pub dabblers_per_topic: usize,
    pub papers_per_expert: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub num_institutions: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            num_authors: 240,
            num_publications: 2200,
            num_topics: 8,
            experts_per_topic: 6,
            dabblers_per_topic: 8,
            papers_per_expert: 18,
            first_year: 1990,
            last_year: 2012,
            num_institutions: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthTopic {
    pub query_id: String,
    pub query_text: String,
    pub experts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthCorpus {
    pub publications: Vec<Publication>,
    pub authors: Vec<AuthorRecord>,
    pub topics: Vec<SynthTopic>,
}

struct Draft {
    year: i32,
    topic: usize,
    matching: bool,
    authors: Vec<usize>,
    venue: VenueKind,
    by_expert: bool,
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    let k = cfg.num_topics;
    if k == 0 || k > TOPICS.len() {
        return Err(Error::InvalidArgument(format!("topics must be in 1..={}", TOPICS.len())));
    }
    if cfg.experts_per_topic < 2 {
        return Err(Error::InvalidArgument("need at least 2 experts per topic".into()));
    }
    let special = k * (cfg.experts_per_topic + cfg.dabblers_per_topic);
    if cfg.num_authors < special + 10 {
        return Err(Error::InvalidArgument(format!("need more than {special} authors")));
    }
    if cfg.last_year <= cfg.first_year {
        return Err(Error::InvalidArgument("last_year must exceed first_year".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Shuffle roles over author ids so id order says nothing about expertise.
    let mut slots: Vec<usize> = (0..cfg.num_authors).collect();
    slots.shuffle(&mut rng);
    let experts: Vec<Vec<usize>> = (0..k)
        .map(|t| slots[t * cfg.experts_per_topic..(t + 1) * cfg.experts_per_topic].to_vec())
        .collect();
    let off = k * cfg.experts_per_topic;
    let dabblers: Vec<Vec<usize>> = (0..k)
        .map(|t| slots[off + t * cfg.dabblers_per_topic..off + (t + 1) * cfg.dabblers_per_topic].to_vec())
        .collect();
    let background: Vec<usize> = slots[special..].to_vec();

    let span = cfg.last_year - cfg.first_year;
    let mut drafts: Vec<Draft> = Vec::new();
    for (t, group) in experts.iter().enumerate() {
        for &e in group {
            let start = cfg.first_year + rng.gen_range(0..=span / 3);
            for _ in 0..cfg.papers_per_expert {
                let mut authors = vec![e];
                if rng.gen_bool(0.4) {
                    let other = group[rng.gen_range(0..group.len())];
                    if other != e {
                        authors.push(other);
                    }
                }
                if rng.gen_bool(0.3) {
                    authors.push(background[rng.gen_range(0..background.len())]);
                }
                drafts.push(Draft {
                    year: rng.gen_range(start..=cfg.last_year),
                    topic: t,
                    matching: rng.gen_bool(0.9),
                    authors,
                    venue: if rng.gen_bool(0.5) { VenueKind::Conference } else { VenueKind::Journal },
                    by_expert: true,
                });
            }
        }
    }
    for (t, group) in dabblers.iter().enumerate() {
        for &d in group {
            for _ in 0..rng.gen_range(2..=4) {
                drafts.push(Draft {
                    year: rng.gen_range(cfg.first_year + span / 2..=cfg.last_year),
                    topic: t,
                    matching: true,
                    authors: vec![d],
                    venue: if rng.gen_bool(0.8) { VenueKind::Conference } else { VenueKind::Journal },
                    by_expert: false,
                });
            }
        }
    }
    let everyone_else: Vec<usize> = dabblers.concat().into_iter().chain(background.iter().copied()).collect();
    while drafts.len() < cfg.num_publications {
        let mut authors = vec![everyone_else[rng.gen_range(0..everyone_else.len())]];
        if rng.gen_bool(0.3) {
            let other = background[rng.gen_range(0..background.len())];
            if other != authors[0] {
                authors.push(other);
            }
        }
        drafts.push(Draft {
            year: rng.gen_range(cfg.first_year..=cfg.last_year),
            topic: rng.gen_range(0..k),
            matching: rng.gen_bool(0.05),
            authors,
            venue: if rng.gen_bool(0.6) { VenueKind::Conference } else { VenueKind::Journal },
            by_expert: false,
        });
    }
    // Chronological ids; equal years keep a random order.
    drafts.shuffle(&mut rng);
    drafts.sort_by_key(|d| d.year);

    let ids: Vec<String> = (0..drafts.len()).map(|i| format!("p{:05}", i + 1)).collect();
    let author_id = |a: usize| format!("a{:04}", a + 1);
    let mut expert_papers: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut publications = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.iter().enumerate() {
        let mut cited = BTreeSet::new();
        let earlier = (0..i).filter(|&j| drafts[j].year < d.year).count();
        if earlier > 0 {
            let topical = &expert_papers[d.topic];
            for _ in 0..rng.gen_range(0..=6usize) {
                let j = if !topical.is_empty() && rng.gen_bool(0.6) {
                    topical[rng.gen_range(0..topical.len())]
                } else {
                    rng.gen_range(0..earlier)
                };
                if drafts[j].year < d.year {
                    cited.insert(j);
                }
            }
        }
        let (title, abstract_text) = text_for(&mut rng, d.topic, d.matching);
        let mut authors: Vec<String> = Vec::new();
        for &a in &d.authors {
            let id = author_id(a);
            if !authors.contains(&id) {
                authors.push(id);
            }
        }
        publications.push(Publication {
            id: ids[i].clone(),
            year: d.year,
            venue_kind: d.venue,
            venue_name: format!("{}{}", if d.venue == VenueKind::Conference { "CONF" } else { "JOUR" }, d.topic),
            author_ids: authors,
            cited_ids: cited.into_iter().map(|j| ids[j].clone()).collect(),
            title,
            abstract_text,
        });
        if d.by_expert && d.matching {
            expert_papers[d.topic].push(i);
        }
    }

    let authors = (0..cfg.num_authors)
        .map(|a| AuthorRecord {
            id: author_id(a),
            name: format!("Author {}", a + 1),
            institution: if rng.gen_bool(0.9) {
                Some(format!("inst{:02}", rng.gen_range(0..cfg.num_institutions.max(1)) + 1))
            } else {
                None
            },
        })
        .collect();
    let topics = (0..k)
        .map(|t| {
            let mut ids: Vec<String> = experts[t].iter().map(|&a| author_id(a)).collect();
            ids.sort();
            SynthTopic {
                query_id: format!("q{}", t + 1),
                query_text: format!("{} {}", TOPICS[t][0], TOPICS[t][1]),
                experts: ids,
            }
        })
        .collect();
    Ok(SynthCorpus {
        publications,
        authors,
        topics,
    })
}

/// Title and abstract for a topic; a matching paper contains both query
/// words, a non-matching one at most the first.
fn text_for(rng: &mut ChaCha8Rng, topic: usize, matching: bool) -> (String, String) {
    let words = &TOPICS[topic];
    let pick = |rng: &mut ChaCha8Rng, from: &[&'static str], n: usize| -> Vec<&'static str> {
        (0..n).map(|_| from[rng.gen_range(0..from.len())]).collect()
    };
    let mut title = pick(rng, &words[2..], 2);
    title.extend(pick(rng, &FILLER, 2));
    let (n_topic, n_filler) = (rng.gen_range(3..=6), rng.gen_range(4..=10));
    let mut abs = pick(rng, &words[2..], n_topic);
    abs.extend(pick(rng, &FILLER, n_filler));
    if matching {
        title.insert(0, words[0]);
        title.insert(1, words[1]);
        if rng.gen_bool(0.5) {
            abs.push(words[0]);
        }
    } else if rng.gen_bool(0.5) {
        abs.push(words[0]);
    }
    abs.shuffle(rng);
    (title.join(" "), abs.join(" "))
}

impl SynthCorpus {
    pub fn publications_text(&self) -> String {
        let mut s = String::new();
        for p in &self.publications {
            let _ = writeln!(s, "{}", format_publication(p));
        }
        s
    }

    pub fn authors_text(&self) -> String {
        let mut s = String::new();
        for a in &self.authors {
            let _ = writeln!(s, "{}\t{}\t{}", a.id, a.name, a.institution.as_deref().unwrap_or(""));
        }
        s
    }

    /// Judgments: every planted expert is relevant; negatives are left to
    /// sampling.
    pub fn judgments_text(&self) -> String {
        let mut s = String::new();
        for t in &self.topics {
            for e in &t.experts {
                let _ = writeln!(s, "{}\t{}\t{}\t1", t.query_id, t.query_text, e);
            }
        }
        s
    }

    /// Writes `publications.tsv`, `authors.tsv` and `judgments.tsv`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in [
            ("publications.tsv", self.publications_text()),
            ("authors.tsv", self.authors_text()),
            ("judgments.tsv", self.judgments_text()),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;

    #[test]
    fn default_corpus_meets_size_and_is_deterministic() {
        let cfg = SynthConfig::default();
        let a = generate(&cfg).unwrap();
        assert!(a.authors.len() >= 200);
        assert!(a.publications.len() >= 2000);
        assert_eq!(a.topics.len(), 8);
        assert_eq!(a, generate(&cfg).unwrap());
        let b = generate(&SynthConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.publications_text(), b.publications_text());
        let c = Corpus::build(a.publications.clone(), a.authors.clone()).unwrap();
        assert_eq!(c.dropped_citations(), 0);
        assert_eq!(c.num_authors(), 240);
    }

    #[test]
    fn experts_dominate_their_topic_citations() {
        let s = generate(&SynthConfig::default()).unwrap();
        let c = Corpus::build(s.publications.clone(), s.authors.clone()).unwrap();
        let cites = |id: &str| -> usize {
            c.publications_of(c.author_index(id).unwrap()).iter().map(|&p| c.citation_count(p)).sum()
        };
        let experts: BTreeSet<&str> = s.topics.iter().flat_map(|t| t.experts.iter().map(String::as_str)).collect();
        let min_expert = experts.iter().map(|e| cites(e)).min().unwrap();
        let others: Vec<usize> = c.authors().iter().filter(|a| !experts.contains(a.id.as_str())).map(|a| cites(&a.id)).collect();
        let mean_other = others.iter().sum::<usize>() as f64 / others.len() as f64;
        assert!(min_expert as f64 > 2.0 * mean_other, "{min_expert} vs {mean_other}");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(generate(&SynthConfig { num_topics: 9, ..Default::default() }).is_err());
        assert!(generate(&SynthConfig { num_authors: 50, ..Default::default() }).is_err());
    }
}
