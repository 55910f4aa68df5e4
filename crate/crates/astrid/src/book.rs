//! Runs every code block in the book as a doctest, keeping the guide and
//! the library in sync.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        mod $name {}
    };
}

chapter!(introduction, "../../../book/src/introduction.md");
chapter!(datasets, "../../../book/src/datasets.md");
chapter!(groupings, "../../../book/src/groupings.md");
chapter!(classifiers, "../../../book/src/classifiers.md");
chapter!(evaluation, "../../../book/src/evaluation.md");
chapter!(search, "../../../book/src/search.md");
chapter!(cli, "../../../book/src/cli.md");
