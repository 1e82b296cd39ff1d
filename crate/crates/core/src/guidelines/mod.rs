//! Homepage usability guideline catalog and per-page evaluation.
//!
//! Seventeen guidelines grouped into nine categories. Each rule maps a
//! parsed page to Neutral (nothing in scope), Violate or Respect. Error is
//! a whole-site status handled by the pipeline, never a per-rule verdict.

mod rules;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dom::Document;

pub use rules::run_guideline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GuidelineId {
    LinkLabel,
    Freshness,
    NoframesValidity,
    LinkToHome,
    FrameTitles,
    TableCoding,
    ImageCoding,
    ExplicitMailto,
    PageTitle,
    TableHeaders,
    LinkTargets,
    PortableFontFaces,
    ImageAlt,
    FramesResizing,
    FormCoding,
    KeywordsDescription,
    MarqueeBlink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GuidelineCategory {
    ConsistencyOfPresentation,
    AdequateFeedback,
    ContextualNavigation,
    EfficientNavigation,
    ClearLabels,
    Robustness,
    Flexibility,
    SupportOfUserGoals,
    Other,
}

impl GuidelineCategory {
    pub fn label(self) -> &'static str {
        match self {
            GuidelineCategory::ConsistencyOfPresentation => {
                "Consistency of presentation and controls"
            }
            GuidelineCategory::AdequateFeedback => "Adequate feedback",
            GuidelineCategory::ContextualNavigation => "Contextual navigation",
            GuidelineCategory::EfficientNavigation => "Efficient navigation",
            GuidelineCategory::ClearLabels => "Clear and meaningful labels",
            GuidelineCategory::Robustness => "Robustness",
            GuidelineCategory::Flexibility => "Flexibility",
            GuidelineCategory::SupportOfUserGoals => "Support of users goals",
            GuidelineCategory::Other => "Other",
        }
    }
}

impl GuidelineId {
    /// Catalog order; also the column order of every report.
    pub const ALL: [GuidelineId; 17] = [
        GuidelineId::LinkLabel,
        GuidelineId::Freshness,
        GuidelineId::NoframesValidity,
        GuidelineId::LinkToHome,
        GuidelineId::FrameTitles,
        GuidelineId::TableCoding,
        GuidelineId::ImageCoding,
        GuidelineId::ExplicitMailto,
        GuidelineId::PageTitle,
        GuidelineId::TableHeaders,
        GuidelineId::LinkTargets,
        GuidelineId::PortableFontFaces,
        GuidelineId::ImageAlt,
        GuidelineId::FramesResizing,
        GuidelineId::FormCoding,
        GuidelineId::KeywordsDescription,
        GuidelineId::MarqueeBlink,
    ];

    /// Dotted identifier such as `"7.1"`.
    pub fn code(self) -> &'static str {
        match self {
            GuidelineId::LinkLabel => "1.1",
            GuidelineId::Freshness => "2.1",
            GuidelineId::NoframesValidity => "3.1",
            GuidelineId::LinkToHome => "3.2",
            GuidelineId::FrameTitles => "3.3",
            GuidelineId::TableCoding => "4.1",
            GuidelineId::ImageCoding => "4.2",
            GuidelineId::ExplicitMailto => "5.1",
            GuidelineId::PageTitle => "5.2",
            GuidelineId::TableHeaders => "5.3",
            GuidelineId::LinkTargets => "6.1",
            GuidelineId::PortableFontFaces => "6.2",
            GuidelineId::ImageAlt => "7.1",
            GuidelineId::FramesResizing => "7.2",
            GuidelineId::FormCoding => "8.1",
            GuidelineId::KeywordsDescription => "9.1",
            GuidelineId::MarqueeBlink => "9.2",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GuidelineId::LinkLabel => "Link label",
            GuidelineId::Freshness => "Freshness",
            GuidelineId::NoframesValidity => "NOFRAMES validity",
            GuidelineId::LinkToHome => "Link to home",
            GuidelineId::FrameTitles => "Frame titles",
            GuidelineId::TableCoding => "Table coding",
            GuidelineId::ImageCoding => "Image coding",
            GuidelineId::ExplicitMailto => "Explicit mailto addresses",
            GuidelineId::PageTitle => "Missing page title",
            GuidelineId::TableHeaders => "Table headers",
            GuidelineId::LinkTargets => "Link targets",
            GuidelineId::PortableFontFaces => "Portable font-faces",
            GuidelineId::ImageAlt => "Image ALT",
            GuidelineId::FramesResizing => "Frames resizing",
            GuidelineId::FormCoding => "Form coding",
            GuidelineId::KeywordsDescription => "Keywords/description",
            GuidelineId::MarqueeBlink => "Marquee, blink",
        }
    }

    /// What a page must do to respect the guideline.
    pub fn requirement(self) -> &'static str {
        match self {
            GuidelineId::LinkLabel => "links sharing a destination use one label",
            GuidelineId::Freshness => "page carries a date stamp and an author stamp",
            GuidelineId::NoframesValidity => {
                "framed pages offer NOFRAMES content with navigation links"
            }
            GuidelineId::LinkToHome => "page links back to the site homepage",
            GuidelineId::FrameTitles => "every frame and iframe has a title attribute",
            GuidelineId::TableCoding => "every table declares width and height",
            GuidelineId::ImageCoding => "every image declares width and height",
            GuidelineId::ExplicitMailto => "mailto link labels show the email address",
            GuidelineId::PageTitle => "page has a non-empty title",
            GuidelineId::TableHeaders => "every table has header cells",
            GuidelineId::LinkTargets => "framed pages avoid target=\"_blank\"",
            GuidelineId::PortableFontFaces => "font face lists include a widely available font",
            GuidelineId::ImageAlt => "every image has non-empty alt text",
            GuidelineId::FramesResizing => "frameset rows and cols use relative sizes",
            GuidelineId::FormCoding => "every form has submit and reset controls",
            GuidelineId::KeywordsDescription => "page has keywords and description meta tags",
            GuidelineId::MarqueeBlink => "page has no marquee or blink elements",
        }
    }

    pub fn category(self) -> GuidelineCategory {
        use GuidelineCategory as C;
        match self {
            GuidelineId::LinkLabel => C::ConsistencyOfPresentation,
            GuidelineId::Freshness => C::AdequateFeedback,
            GuidelineId::NoframesValidity | GuidelineId::LinkToHome | GuidelineId::FrameTitles => {
                C::ContextualNavigation
            }
            GuidelineId::TableCoding | GuidelineId::ImageCoding => C::EfficientNavigation,
            GuidelineId::ExplicitMailto | GuidelineId::PageTitle | GuidelineId::TableHeaders => {
                C::ClearLabels
            }
            GuidelineId::LinkTargets | GuidelineId::PortableFontFaces => C::Robustness,
            GuidelineId::ImageAlt | GuidelineId::FramesResizing => C::Flexibility,
            GuidelineId::FormCoding => C::SupportOfUserGoals,
            GuidelineId::KeywordsDescription | GuidelineId::MarqueeBlink => C::Other,
        }
    }

    /// Whether the rule can return Neutral for lack of in-scope elements.
    pub fn is_gated(self) -> bool {
        !matches!(
            self,
            GuidelineId::Freshness
                | GuidelineId::LinkToHome
                | GuidelineId::PageTitle
                | GuidelineId::KeywordsDescription
                | GuidelineId::MarqueeBlink
        )
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for GuidelineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown guideline id {0:?}")]
pub struct UnknownGuideline(pub String);

impl FromStr for GuidelineId {
    type Err = UnknownGuideline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GuidelineId::ALL
            .into_iter()
            .find(|g| g.code() == s.trim())
            .ok_or_else(|| UnknownGuideline(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Neutral,
    Violate,
    Respect,
}

impl Verdict {
    pub fn letter(self) -> char {
        match self {
            Verdict::Neutral => 'N',
            Verdict::Violate => 'V',
            Verdict::Respect => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Verdict> {
        match c {
            'N' => Some(Verdict::Neutral),
            'V' => Some(Verdict::Violate),
            'R' => Some(Verdict::Respect),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One verdict per guideline, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VerdictVector([Verdict; 17]);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid verdict string {0:?}: expected 17 letters from N, V, R")]
pub struct InvalidVerdicts(pub String);

impl VerdictVector {
    pub fn new(verdicts: [Verdict; 17]) -> Self {
        VerdictVector(verdicts)
    }

    pub fn get(&self, id: GuidelineId) -> Verdict {
        self.0[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (GuidelineId, Verdict)> + '_ {
        GuidelineId::ALL.into_iter().zip(self.0.iter().copied())
    }

    pub fn as_array(&self) -> &[Verdict; 17] {
        &self.0
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.0.iter().filter(|&&v| v == verdict).count()
    }

    /// Compact 17-letter form, e.g. `"VVNVNVVRVVNVVNVVV"`.
    pub fn to_letters(&self) -> String {
        self.0.iter().map(|v| v.letter()).collect()
    }

    pub fn from_letters(s: &str) -> Result<Self, InvalidVerdicts> {
        let err = || InvalidVerdicts(s.to_owned());
        let letters: Vec<Verdict> = s
            .chars()
            .map(Verdict::from_letter)
            .collect::<Option<_>>()
            .ok_or_else(err)?;
        let arr: [Verdict; 17] = letters.try_into().map_err(|_| err())?;
        Ok(VerdictVector(arr))
    }
}

impl fmt::Display for VerdictVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_letters())
    }
}

/// Runs every guideline in catalog order.
pub fn evaluate_page(doc: &Document, base_url: &str) -> VerdictVector {
    VerdictVector(GuidelineId::ALL.map(|id| run_guideline(doc, id, base_url)))
}
