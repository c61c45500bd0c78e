#include "ganbench/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ganbench/errors.hpp"

namespace ganbench::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

Value parse_scalar(std::string_view tok, int line);

Value parse_value(std::string_view tok, int line) {
    tok = trim(tok);
    if (tok.empty()) fail(line, "missing value");
    if (tok.front() == '[') {
        if (tok.back() != ']') fail(line, "unterminated array");
        std::vector<Value> items;
        std::string_view body = tok.substr(1, tok.size() - 2);
        // flat arrays only; split on commas outside quotes
        std::string current;
        bool in_str = false;
        auto flush = [&] {
            const std::string_view t = trim(current);
            if (!t.empty()) items.push_back(parse_scalar(t, line));
            current.clear();
        };
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                flush();
                continue;
            }
            current.push_back(c);
        }
        flush();
        Value v;
        v.v = std::move(items);
        v.line = line;
        return v;
    }
    return parse_scalar(tok, line);
}

Value parse_scalar(std::string_view tok, int line) {
    Value v;
    v.line = line;
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"') fail(line, "unterminated string");
        v.v = std::string(tok.substr(1, tok.size() - 2));
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.v = (tok == "true");
        return v;
    }
    const std::string s(tok);
    if (s.find_first_of(".eE") == std::string::npos ||
        (s.size() > 1 && s.find_first_of(".eE", 1) == std::string::npos && s[0] == '-')) {
        try {
            std::size_t used = 0;
            const std::int64_t i = std::stoll(s, &used);
            if (used == s.size()) {
                v.v = i;
                return v;
            }
        } catch (...) {
        }
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used == s.size()) {
            v.v = d;
            return v;
        }
    } catch (...) {
    }
    fail(line, "cannot parse value '" + s + "'");
}

}  // namespace

const std::string& Value::as_string() const {
    if (!is_string()) fail(line, "expected a string");
    return std::get<std::string>(v);
}
std::int64_t Value::as_int() const {
    if (!is_int()) fail(line, "expected an integer");
    return std::get<std::int64_t>(v);
}
double Value::as_double() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
    if (!std::holds_alternative<double>(v)) fail(line, "expected a number");
    return std::get<double>(v);
}
bool Value::as_bool() const {
    if (!is_bool()) fail(line, "expected a boolean");
    return std::get<bool>(v);
}
const std::vector<Value>& Value::as_array() const {
    if (!is_array()) fail(line, "expected an array");
    return std::get<std::vector<Value>>(v);
}

Table parse(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip comments outside strings
        std::string line;
        bool in_str = false;
        for (char c : raw) {
            if (c == '"') in_str = !in_str;
            if (c == '#' && !in_str) break;
            line.push_back(c);
        }
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(line_no, "unterminated section header");
            const std::string_view name = trim(t.substr(1, t.size() - 2));
            std::string sec(name);
            for (const char c : sec)
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
                    c != '.')
                    fail(line_no, "bad section name '" + sec + "'");
            section = sec;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string_view key = trim(t.substr(0, eq));
        if (!valid_key(key)) fail(line_no, "bad key '" + std::string(key) + "'");
        const std::string path =
            section.empty() ? std::string(key) : section + "." + std::string(key);
        if (table.count(path)) fail(line_no, "duplicate key '" + path + "'");
        table[path] = parse_value(t.substr(eq + 1), line_no);
    }
    return table;
}

Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace ganbench::toml

namespace ganbench {

namespace {

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string render_dataset(const DatasetConfig& d) {
    std::ostringstream os;
    os << "source=" << d.source << ";modality=" << d.modality << ";n=" << d.synthetic_n
       << ";res=" << d.resolution << ";ratio=" << d.split_ratio << ";seed=" << d.split_seed
       << ";norm=" << d.normalize << ";lo=" << d.window_lo << ";hi=" << d.window_hi;
    return os.str();
}

std::string render_hyper(const Hyperparameters& h) {
    std::ostringstream os;
    os << to_string(h.family) << ":latent=" << h.latent_dim << ";batch=" << h.batch_size
       << ";epochs=" << h.epochs << ";lr_g=" << h.lr_generator << ";lr_d=" << h.lr_discriminator
       << ";b1=" << h.adam_beta1 << ";b2=" << h.adam_beta2 << ";clip=" << h.clip_c
       << ";n_critic=" << h.n_critic << ";eval=" << h.eval_every
       << ";sat=" << h.saturating_generator_loss << ";gf=" << h.model.gen_base_filters
       << ";df=" << h.model.disc_base_filters << ";slope=" << h.model.leaky_slope
       << ";drop=" << h.model.dropout_prob;
    return os.str();
}

void apply_family_key(Hyperparameters& h, const std::string& key, const toml::Value& v) {
    if (key == "latent_dim") h.latent_dim = static_cast<int>(v.as_int());
    else if (key == "batch_size") h.batch_size = static_cast<int>(v.as_int());
    else if (key == "epochs") h.epochs = static_cast<int>(v.as_int());
    else if (key == "lr_generator") h.lr_generator = v.as_double();
    else if (key == "lr_discriminator") h.lr_discriminator = v.as_double();
    else if (key == "adam_beta1") h.adam_beta1 = v.as_double();
    else if (key == "adam_beta2") h.adam_beta2 = v.as_double();
    else if (key == "clip_c") h.clip_c = v.as_double();
    else if (key == "n_critic") h.n_critic = static_cast<int>(v.as_int());
    else if (key == "eval_every") h.eval_every = static_cast<int>(v.as_int());
    else if (key == "saturating_generator_loss") h.saturating_generator_loss = v.as_bool();
    else if (key == "gen_base_filters") h.model.gen_base_filters = static_cast<int>(v.as_int());
    else if (key == "disc_base_filters") h.model.disc_base_filters = static_cast<int>(v.as_int());
    else if (key == "leaky_slope") h.model.leaky_slope = v.as_double();
    else if (key == "dropout_prob") h.model.dropout_prob = v.as_double();
    else
        throw ConfigError("config line " + std::to_string(v.line) + ": unknown key 'training." +
                          to_string(h.family) + "." + key + "'");
}

}  // namespace

std::string BenchmarkConfig::dataset_hash() const { return fnv1a_hex(render_dataset(dataset)); }

std::string BenchmarkConfig::hash() const {
    std::ostringstream os;
    os << render_dataset(dataset);
    for (const auto& [family, hyper] : families) os << "|" << render_hyper(hyper);
    os << "|pairing=" << to_string(metrics.pairing) << ";cls=" << metrics.classifier
       << ";k=" << metrics.classifier_k << ";splits=" << metrics.n_splits
       << ";eval=" << metrics.eval_every << ";cap=" << metrics.psnr_cap_db
       << ";win=" << (metrics.ssim.window == SsimConstants::Window::gaussian ? "g" : "u")
       << metrics.ssim.window_size << ";sigma=" << metrics.ssim.sigma;
    os << "|alphas=";
    for (double a : stats.alphas) os << a << ",";
    os << "|seed=" << master_seed;
    return fnv1a_hex(os.str());
}

BenchmarkConfig config_from_table(const toml::Table& table) {
    BenchmarkConfig cfg;
    for (const auto f : {ModelFamily::VANILLA, ModelFamily::DCGAN, ModelFamily::WGAN})
        cfg.families[f] = Hyperparameters::defaults(f);

    // metrics.eval_every must win over family defaults but lose to explicit
    // per-family keys; collect family keys and apply them last.
    std::vector<std::pair<std::string, toml::Value>> family_keys;

    for (const auto& [path, value] : table) {
        const auto line = std::to_string(value.line);
        auto unknown = [&]() -> ConfigError {
            return ConfigError("config line " + line + ": unknown key '" + path + "'");
        };
        if (path == "dataset.source") cfg.dataset.source = value.as_string();
        else if (path == "dataset.modality") cfg.dataset.modality = value.as_string();
        else if (path == "dataset.synthetic_n") cfg.dataset.synthetic_n = static_cast<int>(value.as_int());
        else if (path == "dataset.resolution") cfg.dataset.resolution = static_cast<int>(value.as_int());
        else if (path == "dataset.split_ratio") cfg.dataset.split_ratio = value.as_double();
        else if (path == "dataset.split_seed") cfg.dataset.split_seed = static_cast<std::uint64_t>(value.as_int());
        else if (path == "dataset.normalize") cfg.dataset.normalize = value.as_string();
        else if (path == "dataset.window_lo") cfg.dataset.window_lo = static_cast<int>(value.as_int());
        else if (path == "dataset.window_hi") cfg.dataset.window_hi = static_cast<int>(value.as_int());
        else if (path == "output.dir") cfg.output_dir = value.as_string();
        else if (path == "training.master_seed") cfg.master_seed = static_cast<std::uint64_t>(value.as_int());
        else if (path == "training.checkpoint_every") cfg.checkpoint_every = static_cast<int>(value.as_int());
        else if (path.rfind("training.", 0) == 0) {
            const std::string rest = path.substr(9);
            const auto dot = rest.find('.');
            if (dot == std::string::npos) throw unknown();
            const std::string fam = rest.substr(0, dot);
            const std::string key = rest.substr(dot + 1);
            ModelFamily family;
            try {
                family = family_from_string(fam);
            } catch (const Error&) {
                throw unknown();
            }
            family_keys.emplace_back(to_string(family) + "." + key, value);
        } else if (path == "metrics.pairing") cfg.metrics.pairing = pairing_from_string(value.as_string());
        else if (path == "metrics.classifier") cfg.metrics.classifier = value.as_string();
        else if (path == "metrics.classifier_k") cfg.metrics.classifier_k = static_cast<int>(value.as_int());
        else if (path == "metrics.n_splits") cfg.metrics.n_splits = static_cast<int>(value.as_int());
        else if (path == "metrics.eval_every") cfg.metrics.eval_every = static_cast<int>(value.as_int());
        else if (path == "metrics.psnr_cap_db") cfg.metrics.psnr_cap_db = value.as_double();
        else if (path == "metrics.ssim_window") {
            const std::string w = value.as_string();
            if (w == "gaussian") cfg.metrics.ssim.window = SsimConstants::Window::gaussian;
            else if (w == "uniform") cfg.metrics.ssim.window = SsimConstants::Window::uniform;
            else throw ConfigError("config line " + line + ": ssim_window must be gaussian|uniform");
        } else if (path == "metrics.ssim_window_size") cfg.metrics.ssim.window_size = static_cast<int>(value.as_int());
        else if (path == "metrics.ssim_sigma") cfg.metrics.ssim.sigma = value.as_double();
        else if (path == "stats.alphas") {
            cfg.stats.alphas.clear();
            for (const auto& a : value.as_array()) cfg.stats.alphas.push_back(a.as_double());
        } else throw unknown();
    }

    for (auto& [_, hyper] : cfg.families) hyper.eval_every = cfg.metrics.eval_every;
    for (const auto& [pathkey, value] : family_keys) {
        const auto dot = pathkey.find('.');
        auto& hyper = cfg.families.at(family_from_string(pathkey.substr(0, dot)));
        apply_family_key(hyper, pathkey.substr(dot + 1), value);
    }

    // validation with key-level diagnostics
    if (cfg.dataset.resolution < 8)
        throw ConfigError("config: dataset.resolution must be >= 8");
    if (cfg.dataset.split_ratio <= 0.0 || cfg.dataset.split_ratio >= 1.0)
        throw ConfigError("config: dataset.split_ratio must be in (0, 1)");
    if (cfg.dataset.source != "synthetic" && !std::filesystem::is_directory(cfg.dataset.source))
        throw ConfigError("config: dataset.source directory does not exist: " +
                          cfg.dataset.source);
    if (cfg.dataset.normalize != "per_image" && cfg.dataset.normalize != "global")
        throw ConfigError("config: dataset.normalize must be per_image|global");
    for (const auto& [family, hyper] : cfg.families) {
        try {
            hyper.validate();
        } catch (const std::exception& e) {
            throw ConfigError("config: training." + to_string(family) + ": " + e.what());
        }
    }
    for (double a : cfg.stats.alphas)
        if (a <= 0.0 || a >= 1.0) throw ConfigError("config: stats.alphas entries must be in (0,1)");
    return cfg;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
    return config_from_table(toml::parse_file(path));
}

std::unique_ptr<ClassifierBackend> make_classifier(const MetricsConfig& metrics) {
    if (metrics.classifier == "moment-probe")
        return std::make_unique<MomentProbeClassifier>(metrics.classifier_k);
    return std::make_unique<ExternalWeightsClassifier>(metrics.classifier);
}

EvalContext make_eval_context(const MetricsConfig& metrics, ClassifierBackend& classifier) {
    EvalContext ctx;
    ctx.classifier = &classifier;
    ctx.pairing = metrics.pairing;
    ctx.is_splits = metrics.n_splits;
    ctx.ssim_consts = metrics.ssim;
    ctx.psnr_cap_db = metrics.psnr_cap_db;
    return ctx;
}

}  // namespace ganbench
