"""debate-forge: mine debate trees into prompt/response corpora and run
multi-turn debate agents over them."""

from .corpus import (
    Corpus,
    CorpusStats,
    ExamplePair,
    TokenizerConfig,
    Vocabulary,
    build_corpus,
    build_vocabulary,
    corpus_statistics,
    encode_tokens,
    load_corpus,
    partition_trees,
    render_example,
    tag_entities,
    tokenize,
    write_corpus,
)
from .evaluation import (
    AggregateReport,
    PerplexityReport,
    PerplexityRow,
    RatingRecord,
    aggregate_ratings,
    make_rating_packets,
    perplexity,
)
from .generation import EchoBackend, GenerationRequest, GeneratorBackend, finalize_tokens
from .grammar import (
    Anchor,
    DebatePath,
    ParsingStrategy,
    PathLimits,
    StancePattern,
    StrategyName,
    compile_stance_pattern,
    custom_strategy,
    enumerate_debate_paths,
    find_splits,
    get_strategy,
    pattern_matches,
    turn_blocks,
)
from .ngram import NgramBackend, NgramModel, generate_ngram, ngram_score, train_ngram
from .orchestrator import (
    DebateConfig,
    DebateTranscript,
    DebateTurn,
    Speaker,
    advance_turn,
    new_debate,
    run_debate,
)
from .retrieval import RetrievalBackend, build_retrieval_index, generate_retrieval
from .tokens import ENT, EOA, EOS, SPECIALS, TURN, UNK
from .tree import (
    ArgumentNode,
    DebateTree,
    Stance,
    TreeFormat,
    english_score,
    load_tree,
    resolve_references,
    save_tree,
    validate_tree,
)

__version__ = "0.1.0"
