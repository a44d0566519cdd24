#include "e2t/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "e2t/embeddings.hpp"
#include "e2t/gradcheck.hpp"
#include "e2t/metrics.hpp"
#include "e2t/training.hpp"

namespace e2t {

namespace {

namespace fs = std::filesystem;

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing required ") + what + " path");
  if (!fs::exists(path)) {
    throw UserError(std::string(what) + " not found: " + path);
  }
}

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& s : raw) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--set expects key=value, got '" + s + "'");
    }
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

RunConfig load_run_config(const Command& cmd) {
  require_file(cmd.config_path, "config file");
  RunConfig cfg = load_config(cmd.config_path, cmd.overrides);
  if (const char* env_seed = std::getenv("E2T_SEED")) {
    try {
      cfg.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw UserError(std::string("E2T_SEED is not an integer: ") + env_seed);
    }
  }
  return cfg;
}

std::vector<std::size_t> parse_candidates(const std::string& spec) {
  std::vector<std::size_t> out;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw UsageError("--candidates expects comma-separated integers, got '" + item + "'");
    }
  }
  return out;
}

void load_pretrained(Summarizer& model) {
  Rng rng(model.cfg.seed + 1);
  if (!model.cfg.word_vectors.empty()) {
    require_file(model.cfg.word_vectors, "word vector file");
    EmbeddingMatrix src =
        load_embeddings(model.cfg.word_vectors, model.src_vocab, model.cfg.word_dim, rng);
    EmbeddingMatrix tgt =
        load_embeddings(model.cfg.word_vectors, model.tgt_vocab, model.cfg.word_dim, rng);
    model.params.at(model.names.emb_src) = src.matrix;
    model.params.at(model.names.emb_tgt) = tgt.matrix;
    std::cout << "word vector coverage: source " << src.coverage << ", target "
              << tgt.coverage << '\n';
  }
  if (model.cfg.use_e2t && !model.cfg.entity_vectors.empty()) {
    require_file(model.cfg.entity_vectors, "entity vector file");
    EmbeddingMatrix ent = load_embeddings(model.cfg.entity_vectors, model.ent_vocab,
                                          model.cfg.entity_dim, rng);
    model.params.at(model.names.emb_ent) = ent.matrix;
    std::cout << "entity vector coverage: " << ent.coverage << '\n';
  }
}

int cmd_train(const Command& cmd) {
  RunConfig cfg = load_run_config(cmd);
  require_file(cmd.data_path, "training corpus");
  require_file(cmd.dev_path, "development corpus");
  if (cmd.model_dir.empty()) throw UsageError("train needs --out <model dir>");
  const auto train_docs = load_corpus(cmd.data_path);
  const auto dev_docs = load_corpus(cmd.dev_path);
  CorpusVocabs vocabs = build_vocabularies(train_docs, cfg.vocab_cap);
  Summarizer model = Summarizer::create(cfg, vocabs.src, vocabs.tgt, vocabs.ent);
  load_pretrained(model);
  TrainResult result = train_model(model, train_docs, dev_docs, &std::cout);
  model.save(cmd.model_dir);
  std::ofstream log_out(fs::path(cmd.model_dir) / "train.log");
  for (const EpochLog& e : result.log) log_out << format_epoch_log(e) << '\n';
  std::cout << "best epoch " << result.best_epoch << ", dev perplexity "
            << result.best_dev_perplexity << '\n';
  std::cout << "model saved to " << cmd.model_dir << '\n';
  return 0;
}

int cmd_tune_k(const Command& cmd) {
  RunConfig cfg = load_run_config(cmd);
  require_file(cmd.data_path, "training corpus");
  require_file(cmd.dev_path, "development corpus");
  const auto train_docs = load_corpus(cmd.data_path);
  const auto dev_docs = load_corpus(cmd.dev_path);
  TuneKResult result =
      tune_k(cfg, train_docs, dev_docs, parse_candidates(cmd.candidates), &std::cout);
  std::cout << "chosen_k\t" << result.k << '\n';
  return 0;
}

int cmd_summarize(const Command& cmd) {
  if (cmd.model_dir.empty()) throw UsageError("summarize needs --model <dir>");
  require_file(cmd.model_dir, "model directory");
  require_file(cmd.input_path, "input corpus");
  Summarizer model = Summarizer::load(cmd.model_dir);
  const auto docs = load_corpus(cmd.input_path, LoadOptions{.require_target = false});
  const std::size_t beam = cmd.beam ? cmd.beam : model.cfg.beam;
  std::ostream* out = &std::cout;
  std::ofstream file_out;
  if (!cmd.output_path.empty()) {
    file_out.open(cmd.output_path);
    if (!file_out) throw UserError("cannot open output file " + cmd.output_path);
    out = &file_out;
  }
  for (const AnnotatedDocument& doc : docs) {
    const std::vector<std::string> tokens =
        model.summarize(doc, beam, model.cfg.max_len);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) *out << ' ';
      *out << tokens[i];
    }
    *out << '\n';
  }
  return 0;
}

int cmd_evaluate(const Command& cmd) {
  if (cmd.model_dir.empty()) throw UsageError("evaluate needs --model <dir>");
  require_file(cmd.model_dir, "model directory");
  require_file(cmd.data_path, "test corpus");
  Summarizer model = Summarizer::load(cmd.model_dir);
  const auto docs = load_corpus(cmd.data_path);
  const std::size_t beam = cmd.beam ? cmd.beam : model.cfg.beam;
  RougeReport report = evaluate_corpus(docs, [&](const AnnotatedDocument& doc) {
    return model.summarize(doc, beam, model.cfg.max_len);
  });
  std::cout << report.to_string();
  return 0;
}

int cmd_annotate(const Command& cmd) {
  require_file(cmd.gazetteer_path, "gazetteer file");
  require_file(cmd.input_path, "input file");
  const Gazetteer gazetteer = Gazetteer::load(cmd.gazetteer_path);
  std::ifstream in(cmd.input_path);
  std::ostream* out = &std::cout;
  std::ofstream file_out;
  if (!cmd.output_path.empty()) {
    file_out.open(cmd.output_path);
    if (!file_out) throw UserError("cannot open output file " + cmd.output_path);
    out = &file_out;
  }
  std::string line;
  std::size_t line_no = 0, doc_no = 0;
  auto tokenize_lower = [](const std::string& text) {
    std::istringstream ts(text);
    std::vector<std::string> tokens;
    std::string tok;
    while (ts >> tok) {
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(tok);
    }
    return tokens;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw UserError(cmd.input_path + ":" + std::to_string(line_no) +
                      ": expected 'source<TAB>target'");
    }
    AnnotatedDocument doc;
    std::ostringstream id;
    id << "doc-" << ++doc_no;
    doc.id = id.str();
    doc.source_tokens = tokenize_lower(line.substr(0, tab));
    doc.target_tokens = tokenize_lower(line.substr(tab + 1));
    if (doc.source_tokens.empty() || doc.target_tokens.empty()) {
      throw UserError(cmd.input_path + ":" + std::to_string(line_no) +
                      ": empty source or target");
    }
    doc.entities = gazetteer.annotate(doc.source_tokens);
    *out << document_to_json(doc) << '\n';
  }
  return 0;
}

int cmd_stats(const Command& cmd) {
  require_file(cmd.data_path, "corpus");
  const auto docs = load_corpus(cmd.data_path);
  std::cout << corpus_stats(docs).to_string();
  return 0;
}

int cmd_gradcheck() {
  const std::vector<GradCheckResult> results = run_gradient_suite();
  for (const GradCheckResult& r : results) std::cout << format_gradcheck(r) << '\n';
  return all_passed(results) ? 0 : 2;
}

}  // namespace

Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"entity-aware abstractive summarizer"};
  app.require_subcommand(0, 1);

  Command cmd;
  std::vector<std::string> raw_sets;

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", cmd.config_path, "config file")->required();
  train->add_option("--data", cmd.data_path, "training corpus (JSON lines)")->required();
  train->add_option("--dev", cmd.dev_path, "development corpus")->required();
  train->add_option("--out", cmd.model_dir, "output model directory")->required();
  train->add_option("--set", raw_sets, "config override key=value");

  auto* tune = app.add_subcommand("tune-k", "pick k by dev perplexity");
  tune->add_option("--config", cmd.config_path)->required();
  tune->add_option("--data", cmd.data_path)->required();
  tune->add_option("--dev", cmd.dev_path)->required();
  tune->add_option("--candidates", cmd.candidates, "comma-separated k values");
  tune->add_option("--set", raw_sets);

  auto* summarize = app.add_subcommand("summarize", "decode summaries");
  summarize->add_option("--model", cmd.model_dir)->required();
  summarize->add_option("--input", cmd.input_path)->required();
  summarize->add_option("--output", cmd.output_path);
  summarize->add_option("--beam", cmd.beam);

  auto* evaluate = app.add_subcommand("evaluate", "score a test corpus");
  evaluate->add_option("--model", cmd.model_dir)->required();
  evaluate->add_option("--data", cmd.data_path)->required();
  evaluate->add_option("--beam", cmd.beam);

  auto* annotate = app.add_subcommand("annotate", "gazetteer entity annotation");
  annotate->add_option("--gazetteer", cmd.gazetteer_path)->required();
  annotate->add_option("--input", cmd.input_path, "TSV: source<TAB>target")->required();
  annotate->add_option("--output", cmd.output_path);

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--data", cmd.data_path)->required();

  app.add_subcommand("gradcheck", "finite-difference gradient suite");

  std::vector<const char*> argv;
  argv.push_back("e2t");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cmd.verb = Command::Verb::help;
    cmd.help_text = app.help();
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (app.got_subcommand("train")) cmd.verb = Command::Verb::train;
  else if (app.got_subcommand("tune-k")) cmd.verb = Command::Verb::tune_k;
  else if (app.got_subcommand("summarize")) cmd.verb = Command::Verb::summarize;
  else if (app.got_subcommand("evaluate")) cmd.verb = Command::Verb::evaluate;
  else if (app.got_subcommand("annotate")) cmd.verb = Command::Verb::annotate;
  else if (app.got_subcommand("stats")) cmd.verb = Command::Verb::stats;
  else if (app.got_subcommand("gradcheck")) cmd.verb = Command::Verb::gradcheck;
  else {
    cmd.verb = Command::Verb::help;
    cmd.help_text = app.help();
    return cmd;
  }
  cmd.overrides = split_overrides(raw_sets);
  return cmd;
}

int run(const Command& cmd) {
  switch (cmd.verb) {
    case Command::Verb::help:
      std::cout << cmd.help_text;
      return 0;
    case Command::Verb::train:
      return cmd_train(cmd);
    case Command::Verb::tune_k:
      return cmd_tune_k(cmd);
    case Command::Verb::summarize:
      return cmd_summarize(cmd);
    case Command::Verb::evaluate:
      return cmd_evaluate(cmd);
    case Command::Verb::annotate:
      return cmd_annotate(cmd);
    case Command::Verb::stats:
      return cmd_stats(cmd);
    case Command::Verb::gradcheck:
      return cmd_gradcheck();
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(parse_args(args));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun 'e2t --help' for usage\n";
    return 1;
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace e2t
