//! Publication, author and citation corpus.
//!
//! Publications are kept sorted by id, authors likewise; all cross references
//! are resolved to dense indices once at load time. After construction a
//! [`Corpus`] is immutable.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::tokenize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VenueKind {
    Conference,
    Journal,
}

impl VenueKind {
    pub fn code(self) -> char {
        match self {
            VenueKind::Conference => 'C',
            VenueKind::Journal => 'J',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Publication {
    pub id: String,
    pub year: i32,
    pub venue_kind: VenueKind,
    pub venue_name: String,
    pub author_ids: Vec<String>,
    pub cited_ids: Vec<String>,
    pub title: String,
    /// Empty when the record carries no abstract.
    pub abstract_text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Author {
    pub id: String,
    pub name: String,
    pub institution: Option<String>,
    /// Sorted by publication id.
    pub publication_ids: Vec<String>,
}

/// Summary counts of a corpus, as printed by `ingest`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusStats {
    pub num_publications: usize,
    pub num_authors: usize,
    pub num_citation_links: usize,
    pub num_with_abstract: usize,
    pub num_conference: usize,
    pub num_journal: usize,
    pub dropped_citations: usize,
    pub avg_doc_length_title: f64,
    pub avg_doc_length_abstract: f64,
    pub current_year: i32,
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "total_authors\t{}", self.num_authors)?;
        writeln!(f, "total_publications\t{}", self.num_publications)?;
        writeln!(f, "publications_with_abstract\t{}", self.num_with_abstract)?;
        writeln!(f, "conference_papers\t{}", self.num_conference)?;
        writeln!(f, "journal_papers\t{}", self.num_journal)?;
        writeln!(f, "citation_links\t{}", self.num_citation_links)?;
        writeln!(f, "dropped_citations\t{}", self.dropped_citations)?;
        writeln!(f, "avg_title_tokens\t{}", self.avg_doc_length_title)?;
        writeln!(f, "avg_abstract_tokens\t{}", self.avg_doc_length_abstract)?;
        write!(f, "current_year\t{}", self.current_year)
    }
}

/// Persisted part of the corpus; indices are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct CorpusData {
    publications: Vec<Publication>,
    authors: Vec<Author>,
    dropped_citations: usize,
}

const SNAPSHOT_MAGIC: &[u8; 8] = b"EXRKCRP1";

#[derive(Debug, Clone)]
pub struct Corpus {
    publications: Vec<Publication>,
    authors: Vec<Author>,
    dropped_citations: usize,
    pub_index: HashMap<String, usize>,
    author_index: HashMap<String, usize>,
    pub_authors: Vec<Vec<usize>>,
    author_pubs: Vec<Vec<usize>>,
    cites: Vec<Vec<usize>>,
    cited_by: Vec<Vec<usize>>,
}

/// Author row as read from the author file.
#[derive(Clone, Debug, PartialEq)]
pub struct AuthorRecord {
    pub id: String,
    pub name: String,
    pub institution: Option<String>,
}

impl Corpus {
    /// Loads the publication file and, optionally, the author file.
    pub fn load(publications: &Path, authors: Option<&Path>) -> Result<Self> {
        let pubs = read_publications(publications)?;
        let authors = match authors {
            Some(p) => read_authors(p)?,
            None => Vec::new(),
        };
        Corpus::build(pubs, authors)
    }

    /// Validates raw records and resolves all references.
    ///
    /// Duplicate ids are rejected. Citations to ids outside the corpus and
    /// self-citations are dropped and counted; repeated citations collapse.
    pub fn build(mut publications: Vec<Publication>, author_records: Vec<AuthorRecord>) -> Result<Self> {
        publications.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in publications.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::Validation(format!("duplicate publication id {}", pair[0].id)));
            }
        }
        for p in &publications {
            if p.year <= 0 {
                return Err(Error::Validation(format!("publication {} has non-positive year", p.id)));
            }
            if p.author_ids.is_empty() {
                return Err(Error::Validation(format!("publication {} has no authors", p.id)));
            }
        }

        let known: BTreeSet<&str> = publications.iter().map(|p| p.id.as_str()).collect();
        let mut dropped = 0;
        let mut cleaned = Vec::with_capacity(publications.len());
        for p in &publications {
            let mut seen = BTreeSet::new();
            let mut kept = Vec::new();
            for c in &p.cited_ids {
                if c == &p.id || !known.contains(c.as_str()) {
                    dropped += 1;
                } else if seen.insert(c.clone()) {
                    kept.push(c.clone());
                }
            }
            cleaned.push(kept);
        }
        for (p, kept) in publications.iter_mut().zip(cleaned) {
            p.cited_ids = kept;
            let mut seen = BTreeSet::new();
            p.author_ids.retain(|a| seen.insert(a.clone()));
        }

        let mut records: HashMap<String, AuthorRecord> = HashMap::new();
        for r in author_records {
            if records.contains_key(&r.id) {
                return Err(Error::Validation(format!("duplicate author id {}", r.id)));
            }
            records.insert(r.id.clone(), r);
        }
        let mut author_ids: BTreeSet<String> = records.keys().cloned().collect();
        for p in &publications {
            author_ids.extend(p.author_ids.iter().cloned());
        }
        let mut by_author: HashMap<&str, Vec<String>> = HashMap::new();
        for p in &publications {
            for a in &p.author_ids {
                by_author.entry(a.as_str()).or_default().push(p.id.clone());
            }
        }
        let authors = author_ids
            .into_iter()
            .map(|id| {
                let publication_ids = by_author.remove(id.as_str()).unwrap_or_default();
                match records.remove(&id) {
                    Some(r) => Author {
                        id,
                        name: r.name,
                        institution: r.institution,
                        publication_ids,
                    },
                    None => Author {
                        name: id.clone(),
                        id,
                        institution: None,
                        publication_ids,
                    },
                }
            })
            .collect();

        Ok(Corpus::from_data(CorpusData {
            publications,
            authors,
            dropped_citations: dropped,
        }))
    }

    fn from_data(data: CorpusData) -> Self {
        let CorpusData {
            publications,
            authors,
            dropped_citations,
        } = data;
        let pub_index: HashMap<String, usize> =
            publications.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
        let author_index: HashMap<String, usize> =
            authors.iter().enumerate().map(|(i, a)| (a.id.clone(), i)).collect();
        let pub_authors: Vec<Vec<usize>> = publications
            .iter()
            .map(|p| p.author_ids.iter().map(|a| author_index[a]).collect())
            .collect();
        let author_pubs: Vec<Vec<usize>> = authors
            .iter()
            .map(|a| a.publication_ids.iter().map(|p| pub_index[p]).collect())
            .collect();
        let cites: Vec<Vec<usize>> = publications
            .iter()
            .map(|p| p.cited_ids.iter().map(|c| pub_index[c]).collect())
            .collect();
        let mut cited_by = vec![Vec::new(); publications.len()];
        for (i, targets) in cites.iter().enumerate() {
            for &t in targets {
                cited_by[t].push(i);
            }
        }
        Corpus {
            publications,
            authors,
            dropped_citations,
            pub_index,
            author_index,
            pub_authors,
            author_pubs,
            cites,
            cited_by,
        }
    }

    pub fn publications(&self) -> &[Publication] {
        &self.publications
    }

    pub fn authors(&self) -> &[Author] {
        &self.authors
    }

    pub fn publication(&self, idx: usize) -> &Publication {
        &self.publications[idx]
    }

    pub fn author(&self, idx: usize) -> &Author {
        &self.authors[idx]
    }

    pub fn publication_index(&self, id: &str) -> Option<usize> {
        self.pub_index.get(id).copied()
    }

    pub fn author_index(&self, id: &str) -> Option<usize> {
        self.author_index.get(id).copied()
    }

    pub fn require_author(&self, id: &str) -> Result<usize> {
        self.author_index(id).ok_or_else(|| Error::not_found("author", id))
    }

    pub fn num_publications(&self) -> usize {
        self.publications.len()
    }

    pub fn num_authors(&self) -> usize {
        self.authors.len()
    }

    pub fn num_citation_links(&self) -> usize {
        self.cites.iter().map(Vec::len).sum()
    }

    pub fn dropped_citations(&self) -> usize {
        self.dropped_citations
    }

    /// Author indices of a publication, in byline order.
    pub fn authors_of(&self, pub_idx: usize) -> &[usize] {
        &self.pub_authors[pub_idx]
    }

    /// Publication indices of an author, in id order.
    pub fn publications_of(&self, author_idx: usize) -> &[usize] {
        &self.author_pubs[author_idx]
    }

    /// Publications cited by `pub_idx`.
    pub fn cites(&self, pub_idx: usize) -> &[usize] {
        &self.cites[pub_idx]
    }

    /// Publications citing `pub_idx`, in id order.
    pub fn cited_by(&self, pub_idx: usize) -> &[usize] {
        &self.cited_by[pub_idx]
    }

    pub fn citation_count(&self, pub_idx: usize) -> usize {
        self.cited_by[pub_idx].len()
    }

    pub fn max_year(&self) -> Option<i32> {
        self.publications.iter().map(|p| p.year).max()
    }

    /// Docs(a): the publications of an author in id order.
    pub fn author_publications(&self, author_id: &str) -> Result<Vec<&Publication>> {
        let a = self.require_author(author_id)?;
        Ok(self.author_pubs[a].iter().map(|&p| &self.publications[p]).collect())
    }

    pub fn stats(&self, current_year_override: Option<i32>) -> Result<CorpusStats> {
        compute_stats(self, current_year_override)
    }

    pub fn to_snapshot_bytes(&self) -> Result<Vec<u8>> {
        let data = CorpusData {
            publications: self.publications.clone(),
            authors: self.authors.clone(),
            dropped_citations: self.dropped_citations,
        };
        let mut out = SNAPSHOT_MAGIC.to_vec();
        bincode::serialize_into(&mut out, &data).map_err(|e| Error::Snapshot(e.to_string()))?;
        Ok(out)
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<Self> {
        let body = bytes
            .strip_prefix(SNAPSHOT_MAGIC.as_slice())
            .ok_or_else(|| Error::Snapshot("not a corpus snapshot".into()))?;
        let data: CorpusData = bincode::deserialize(body).map_err(|e| Error::Snapshot(e.to_string()))?;
        Ok(Corpus::from_data(data))
    }

    pub fn save_snapshot(&self, path: &Path) -> Result<()> {
        let bytes = self.to_snapshot_bytes()?;
        fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load_snapshot(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Corpus::from_snapshot_bytes(&bytes)
    }

    /// Writes the publication file format.
    pub fn write_publications<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.publications {
            writeln!(w, "{}", format_publication(p))?;
        }
        Ok(())
    }

    pub fn write_authors<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for a in &self.authors {
            writeln!(
                w,
                "{}\t{}\t{}",
                a.id,
                clean_field(&a.name),
                clean_field(a.institution.as_deref().unwrap_or(""))
            )?;
        }
        Ok(())
    }
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.publications == other.publications
            && self.authors == other.authors
            && self.dropped_citations == other.dropped_citations
    }
}

pub fn compute_stats(corpus: &Corpus, current_year_override: Option<i32>) -> Result<CorpusStats> {
    let n = corpus.num_publications();
    if n == 0 {
        return Err(Error::Validation("corpus has no publications".into()));
    }
    let title_tokens: usize = corpus.publications.iter().map(|p| tokenize(&p.title).len()).sum();
    let abstract_tokens: usize = corpus.publications.iter().map(|p| tokenize(&p.abstract_text).len()).sum();
    let max_year = corpus.max_year().unwrap_or(0);
    Ok(CorpusStats {
        num_publications: n,
        num_authors: corpus.num_authors(),
        num_citation_links: corpus.num_citation_links(),
        num_with_abstract: corpus.publications.iter().filter(|p| !p.abstract_text.trim().is_empty()).count(),
        num_conference: corpus.publications.iter().filter(|p| p.venue_kind == VenueKind::Conference).count(),
        num_journal: corpus.publications.iter().filter(|p| p.venue_kind == VenueKind::Journal).count(),
        dropped_citations: corpus.dropped_citations,
        avg_doc_length_title: title_tokens as f64 / n as f64,
        avg_doc_length_abstract: abstract_tokens as f64 / n as f64,
        current_year: current_year_override.unwrap_or(max_year),
    })
}

fn clean_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn split_ids(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|x| !x.is_empty()).map(str::to_owned).collect()
}

pub fn format_publication(p: &Publication) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        p.id,
        p.year,
        p.venue_kind.code(),
        clean_field(&p.venue_name),
        p.author_ids.join(";"),
        p.cited_ids.join(";"),
        clean_field(&p.title),
        clean_field(&p.abstract_text)
    )
}

/// Parses one publication line; `line_no` is 1-based and used in errors.
pub fn parse_publication(line: &str, source: &str, line_no: usize) -> Result<Publication> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 8 {
        return Err(Error::parse(source, line_no, format!("expected 8 tab-separated fields, found {}", fields.len())));
    }
    let id = fields[0].trim();
    if id.is_empty() {
        return Err(Error::parse(source, line_no, "empty publication id"));
    }
    let year: i32 = fields[1]
        .trim()
        .parse()
        .map_err(|_| Error::parse(source, line_no, format!("invalid year {:?}", fields[1])))?;
    if year <= 0 {
        return Err(Error::parse(source, line_no, format!("year must be positive, got {year}")));
    }
    let venue_kind = match fields[2].trim() {
        "C" => VenueKind::Conference,
        "J" => VenueKind::Journal,
        other => return Err(Error::parse(source, line_no, format!("venue kind must be C or J, got {other:?}"))),
    };
    let author_ids = split_ids(fields[4]);
    if author_ids.is_empty() {
        return Err(Error::parse(source, line_no, "publication has no authors"));
    }
    Ok(Publication {
        id: id.to_owned(),
        year,
        venue_kind,
        venue_name: fields[3].to_owned(),
        author_ids,
        cited_ids: split_ids(fields[5]),
        title: fields[6].to_owned(),
        abstract_text: fields[7].to_owned(),
    })
}

pub fn parse_author(line: &str, source: &str, line_no: usize) -> Result<AuthorRecord> {
    let fields: Vec<&str> = line.split('\t').collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(Error::parse(source, line_no, format!("expected 3 tab-separated fields, found {}", fields.len())));
    }
    let id = fields[0].trim();
    if id.is_empty() {
        return Err(Error::parse(source, line_no, "empty author id"));
    }
    let institution = fields.get(2).map(|s| s.trim()).filter(|s| !s.is_empty()).map(str::to_owned);
    Ok(AuthorRecord {
        id: id.to_owned(),
        name: fields[1].to_owned(),
        institution,
    })
}

fn read_lines<T>(path: &Path, mut parse: impl FnMut(&str, &str, usize) -> Result<T>) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse(line, &source, i + 1)?);
    }
    Ok(out)
}

pub fn read_publications(path: &Path) -> Result<Vec<Publication>> {
    read_lines(path, parse_publication)
}

pub fn read_authors(path: &Path) -> Result<Vec<AuthorRecord>> {
    read_lines(path, parse_author)
}

/// Parses publication records from in-memory text.
pub fn parse_publications(text: &str) -> Result<Vec<Publication>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_publication(l.strip_suffix('\r').unwrap_or(l), "<input>", i + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, year: i32, authors: &str, cites: &str, title: &str) -> String {
        format!("{id}\t{year}\tC\tVenue\t{authors}\t{cites}\t{title}\t")
    }

    fn corpus(lines: &[String]) -> Result<Corpus> {
        Corpus::build(parse_publications(&lines.join("\n"))?, Vec::new())
    }

    #[test]
    fn two_publications_one_link() {
        let c = corpus(&[line("p1", 2000, "a1", "p2", "x"), line("p2", 1999, "a2", "", "y")]).unwrap();
        assert_eq!(c.num_publications(), 2);
        assert_eq!(c.num_citation_links(), 1);
        assert_eq!(c.dropped_citations(), 0);
        let p2 = c.publication_index("p2").unwrap();
        assert_eq!(c.citation_count(p2), 1);
    }

    #[test]
    fn dangling_citation_dropped_and_counted() {
        let c = corpus(&[line("p1", 2000, "a1", "px", "x"), line("p2", 2000, "a1", "p2", "y")]).unwrap();
        assert_eq!(c.num_citation_links(), 0);
        // px is dangling, p2 -> p2 is a self-reference
        assert_eq!(c.dropped_citations(), 2);
    }

    #[test]
    fn duplicate_id_names_the_id() {
        let err = corpus(&[line("p1", 2000, "a1", "", "x"), line("p1", 2001, "a2", "", "y")]).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("p1")), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = format!("{}\nbroken line", line("p1", 2000, "a1", "", "x"));
        match parse_publications(&text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        let bad_kind = "p1\t2000\tX\tV\ta1\t\tt\t";
        assert!(parse_publications(bad_kind).is_err());
        let bad_year = "p1\t0\tC\tV\ta1\t\tt\t";
        assert!(parse_publications(bad_year).is_err());
        let no_authors = "p1\t2000\tC\tV\t\t\tt\t";
        assert!(parse_publications(no_authors).is_err());
    }

    #[test]
    fn author_publications_in_id_order() {
        let c = Corpus::build(
            parse_publications(&[line("p3", 2000, "a", "", "x"), line("p1", 2001, "a", "", "y")].join("\n")).unwrap(),
            vec![AuthorRecord {
                id: "lonely".into(),
                name: "Lonely".into(),
                institution: None,
            }],
        )
        .unwrap();
        let ids: Vec<&str> = c.author_publications("a").unwrap().iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["p1", "p3"]);
        assert!(c.author_publications("lonely").unwrap().is_empty());
        assert!(matches!(c.author_publications("nobody"), Err(Error::NotFound { .. })));
    }

    #[test]
    fn stats_means_and_year() {
        let c = corpus(&[line("p1", 1999, "a", "", "one two three"), line("p2", 2008, "b", "", "a b c d e")]).unwrap();
        let s = compute_stats(&c, None).unwrap();
        assert_eq!(s.avg_doc_length_title, 4.0);
        assert_eq!(s.avg_doc_length_abstract, 0.0);
        assert_eq!(s.current_year, 2008);
        assert_eq!(compute_stats(&c, Some(2020)).unwrap().current_year, 2020);
        let empty = Corpus::build(Vec::new(), Vec::new()).unwrap();
        assert!(compute_stats(&empty, None).is_err());
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let c = corpus(&[line("p1", 2000, "a1;a2", "p2", "x y"), line("p2", 1999, "a2", "", "y")]).unwrap();
        let bytes = c.to_snapshot_bytes().unwrap();
        let back = Corpus::from_snapshot_bytes(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_snapshot_bytes().unwrap(), bytes);
        assert!(Corpus::from_snapshot_bytes(b"garbage").is_err());
    }

    #[test]
    fn write_then_parse_round_trip() {
        let c = corpus(&[line("p1", 2000, "a1;a2", "p2", "x y"), line("p2", 1999, "a2", "", "y")]).unwrap();
        let mut buf = Vec::new();
        c.write_publications(&mut buf).unwrap();
        let again = Corpus::build(parse_publications(std::str::from_utf8(&buf).unwrap()).unwrap(), Vec::new()).unwrap();
        assert_eq!(again, c);
    }
}
