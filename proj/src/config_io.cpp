#include "polya/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polya/analytic.hpp"
#include "polya/errors.hpp"

namespace polya::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

namespace {

struct Token {
    std::string text;
    int line;
    int column;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const Token& tok) {
    const std::string t = trim(tok.text);
    if (t.empty()) throw ParseError("expected a number", tok.line, tok.column);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError("malformed number '" + t + "'", tok.line, tok.column);
    if (!std::isfinite(v)) throw ParseError("number '" + t + "' is not finite", tok.line, tok.column);
    return v;
}

std::uint64_t parse_u64(const Token& tok) {
    const std::string t = trim(tok.text);
    if (t.empty() || t[0] == '-') throw ParseError("expected an unsigned integer", tok.line, tok.column);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        throw ParseError("malformed integer '" + t + "'", tok.line, tok.column);
    return static_cast<std::uint64_t>(v);
}

model::EntrySpec parse_entry(const Token& tok) {
    const std::string t = trim(tok.text);
    if (t.rfind("exp(", 0) == 0 && t.back() == ')') {
        Token inner{t.substr(4, t.size() - 5), tok.line, tok.column};
        const double rate = parse_number(inner);
        if (!(rate > 0.0))
            throw ParseError("exp(rate) requires a positive rate", tok.line, tok.column);
        return model::EntrySpec::exponential(rate);
    }
    return model::EntrySpec::constant(parse_number(tok));
}

std::vector<Token> parse_list(const Token& tok) {
    const std::string t = trim(tok.text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ParseError("expected a bracketed list", tok.line, tok.column);
    std::vector<Token> items;
    const std::string inner = t.substr(1, t.size() - 2);
    std::size_t pos = 0;
    while (pos <= inner.size()) {
        std::size_t comma = inner.find(',', pos);
        std::string piece =
            comma == std::string::npos ? inner.substr(pos) : inner.substr(pos, comma - pos);
        const std::string trimmed = trim(piece);
        if (!trimmed.empty())
            items.push_back(Token{trimmed, tok.line, tok.column + static_cast<int>(pos) + 1});
        else if (comma != std::string::npos || !items.empty())
            if (!trim(inner).empty() && trimmed.empty() && comma != std::string::npos)
                throw ParseError("empty list element", tok.line, tok.column);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return items;
}

}  // namespace

model::ScenarioConfig parse_scenario(const std::string& text) {
    std::optional<int> dimension;
    std::optional<std::vector<Token>> matrix_tokens;
    std::optional<std::vector<Token>> init_tokens;
    std::optional<double> horizon;
    std::optional<std::vector<Token>> checkpoint_tokens;
    std::uint64_t ensemble_size = 10000;
    std::uint64_t seed = 0;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::size_t comment = raw.find('#');
        std::string line = comment == std::string::npos ? raw : raw.substr(0, comment);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", line_no,
                             static_cast<int>(line.find_first_not_of(" \t")) + 1);
        const std::string key = trim(line.substr(0, eq));
        const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        Token value{trim(line.substr(eq + 1)), line_no, static_cast<int>(eq) + 2};
        if (value.text.empty()) throw ParseError("missing value for '" + key + "'", line_no, value.column);

        if (key == "dimension") {
            dimension = static_cast<int>(parse_u64(value));
        } else if (key == "matrix") {
            matrix_tokens = parse_list(value);
        } else if (key == "init") {
            init_tokens = parse_list(value);
        } else if (key == "horizon") {
            horizon = parse_number(value);
        } else if (key == "checkpoints") {
            checkpoint_tokens = parse_list(value);
        } else if (key == "ensemble_size") {
            ensemble_size = parse_u64(value);
        } else if (key == "seed") {
            seed = parse_u64(value);
        } else {
            throw ParseError("unknown key '" + key + "'", line_no, key_col);
        }
    }

    if (!dimension) throw ValidationError("missing required key 'dimension'");
    if (!matrix_tokens) throw ValidationError("missing required key 'matrix'");
    if (!init_tokens) throw ValidationError("missing required key 'init'");
    if (!horizon) throw ValidationError("missing required key 'horizon'");

    const int c = *dimension;
    if (c < 1) throw ValidationError("dimension must be >= 1");
    if (static_cast<int>(matrix_tokens->size()) != c * c)
        throw ValidationError("matrix must list dimension^2 = " + std::to_string(c * c) +
                              " entries, got " + std::to_string(matrix_tokens->size()));
    if (static_cast<int>(init_tokens->size()) != c)
        throw ValidationError("init must list dimension = " + std::to_string(c) +
                              " values, got " + std::to_string(init_tokens->size()));

    std::vector<model::EntrySpec> entries;
    entries.reserve(matrix_tokens->size());
    for (const auto& tok : *matrix_tokens) entries.push_back(parse_entry(tok));

    Eigen::VectorXd init(c);
    for (int j = 0; j < c; ++j) init[j] = parse_number((*init_tokens)[j]);

    std::vector<double> checkpoints;
    if (checkpoint_tokens) {
        checkpoints.reserve(checkpoint_tokens->size());
        for (const auto& tok : *checkpoint_tokens) checkpoints.push_back(parse_number(tok));
    } else {
        checkpoints.push_back(*horizon);  // default: observe at the horizon
    }

    model::ScenarioConfig config{model::NavigationMatrix(c, std::move(entries)),
                                 model::InitialState{std::move(init)},
                                 *horizon,
                                 std::move(checkpoints),
                                 ensemble_size,
                                 seed};
    model::validate_scenario(config);
    return config;
}

std::string serialize_scenario(const model::ScenarioConfig& config) {
    std::ostringstream oss;
    const int c = config.matrix.dimension();
    oss << "dimension = " << c << "\n";
    oss << "matrix = [";
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            if (i + j > 0) oss << ", ";
            const model::EntrySpec& e = config.matrix.entry(i, j);
            if (e.is_constant())
                oss << format_double(e.value());
            else
                oss << "exp(" << format_double(e.rate()) << ")";
        }
    oss << "]\n";
    oss << "init = [";
    for (Eigen::Index j = 0; j < config.init.coords.size(); ++j) {
        if (j > 0) oss << ", ";
        oss << format_double(config.init.coords[j]);
    }
    oss << "]\n";
    oss << "horizon = " << format_double(config.horizon) << "\n";
    oss << "checkpoints = [";
    for (std::size_t k = 0; k < config.checkpoints.size(); ++k) {
        if (k > 0) oss << ", ";
        oss << format_double(config.checkpoints[k]);
    }
    oss << "]\n";
    oss << "ensemble_size = " << config.ensemble_size << "\n";
    oss << "seed = " << config.master_seed << "\n";
    return oss.str();
}

std::string stats_to_csv(const sim::EnsembleStats& stats) {
    std::ostringstream oss;
    oss << "checkpoint_time,coordinate,mean,variance,covariance_partner,covariance,n\n";
    for (std::size_t cp = 0; cp < stats.checkpoints.size(); ++cp) {
        const sim::MomentAccumulator& acc = stats.per_checkpoint[cp];
        const Eigen::Index c = acc.mean().size();
        for (Eigen::Index j = 0; j < c; ++j) {
            auto emit = [&](std::optional<Eigen::Index> partner) {
                oss << format_double(stats.checkpoints[cp]) << ',' << (j + 1) << ','
                    << format_double(acc.mean()[j]) << ',' << format_double(acc.variance(j))
                    << ',';
                if (partner)
                    oss << (*partner + 1) << ',' << format_double(acc.covariance(j, *partner));
                else
                    oss << ',';
                oss << ',' << acc.count() << "\n";
            };
            if (j + 1 < c) {
                for (Eigen::Index k = j + 1; k < c; ++k) emit(k);
            } else {
                emit(std::nullopt);
            }
        }
    }
    return oss.str();
}

std::string stats_to_json(const sim::EnsembleStats& stats) {
    nlohmann::ordered_json j;
    j["format"] = "ensemble-stats";
    auto& arr = j["checkpoints"] = nlohmann::ordered_json::array();
    for (std::size_t cp = 0; cp < stats.checkpoints.size(); ++cp) {
        const sim::MomentAccumulator& acc = stats.per_checkpoint[cp];
        const Eigen::Index c = acc.mean().size();
        nlohmann::ordered_json e;
        e["time"] = stats.checkpoints[cp];
        e["n"] = acc.count();
        auto& means = e["mean"] = nlohmann::ordered_json::array();
        auto& vars = e["variance"] = nlohmann::ordered_json::array();
        for (Eigen::Index q = 0; q < c; ++q) {
            means.push_back(acc.mean()[q]);
            vars.push_back(acc.variance(q));
        }
        auto& covs = e["covariance"] = nlohmann::ordered_json::array();
        for (Eigen::Index a = 0; a < c; ++a)
            for (Eigen::Index b = a + 1; b < c; ++b) {
                nlohmann::ordered_json pair;
                pair["coordinates"] = {a + 1, b + 1};
                pair["value"] = acc.covariance(a, b);
                covs.push_back(std::move(pair));
            }
        arr.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::string kolmogorov_csv(double i, double delta, int ell_max, double t) {
    std::ostringstream oss;
    oss << "ell,probability\n";
    for (int l = 0; l <= ell_max; ++l)
        oss << l << ',' << format_double(analytic::kolmogorov_prob(i, delta, l, t)) << "\n";
    return oss.str();
}

std::vector<StatsCsvRow> parse_stats_csv(const std::string& text) {
    std::vector<StatsCsvRow> rows;
    std::istringstream stream(text);
    std::string line;
    bool header = true;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (header) {
            header = false;
            continue;
        }
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            fields.push_back(comma == std::string::npos ? line.substr(pos)
                                                        : line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 7) throw ParseError("expected 7 CSV fields", line_no, 1);
        StatsCsvRow row{};
        row.checkpoint_time = parse_number({fields[0], line_no, 1});
        row.coordinate = static_cast<int>(parse_u64({fields[1], line_no, 1}));
        row.mean = parse_number({fields[2], line_no, 1});
        row.variance = parse_number({fields[3], line_no, 1});
        row.covariance_partner =
            trim(fields[4]).empty() ? 0 : static_cast<int>(parse_u64({fields[4], line_no, 1}));
        row.covariance = trim(fields[5]).empty() ? 0.0 : parse_number({fields[5], line_no, 1});
        row.n = parse_u64({fields[6], line_no, 1});
        rows.push_back(row);
    }
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace polya::io
