#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "railnet/solve.hpp"

namespace railnet {

namespace {

constexpr std::size_t kMaxLine = 200;

std::string number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view tok) {
    if (tok.empty()) return std::nullopt;
    std::string lower(tok);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "+infinity")
        return std::numeric_limits<double>::infinity();
    if (lower == "-inf" || lower == "-infinity") return -std::numeric_limits<double>::infinity();
    if (tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

std::string_view sense_text(ConstraintSense s) {
    switch (s) {
        case ConstraintSense::LessEqual: return "<=";
        case ConstraintSense::GreaterEqual: return ">=";
        case ConstraintSense::Equal: return "=";
    }
    return "=";
}

/// Appends tokens to `out`, wrapping long expressions onto continuation lines.
class LineWriter {
public:
    explicit LineWriter(std::string& out) : out_(out) {}
    void start(const std::string& head) {
        out_ += head;
        width_ = head.size();
    }
    void token(const std::string& tok) {
        if (width_ + tok.size() + 1 > kMaxLine) {
            out_ += "\n  ";
            width_ = 2;
        } else {
            out_ += ' ';
            ++width_;
        }
        out_ += tok;
        width_ += tok.size();
    }
    void end() { out_ += '\n'; }

private:
    std::string& out_;
    std::size_t width_ = 0;
};

void write_terms(LineWriter& w, const std::vector<LinearTerm>& terms, const MilpModel& model) {
    bool first = true;
    for (const auto& t : terms) {
        const double c = t.coefficient;
        const std::string& name = model.variables()[t.variable].name;
        std::string tok;
        if (c < 0)
            tok = "- ";
        else if (!first)
            tok = "+ ";
        const double mag = std::abs(c);
        if (mag != 1.0) tok += number(mag) + " ";
        tok += name;
        w.token(tok);
        first = false;
    }
}

}  // namespace

std::string emit_model_text(const MilpModel& model) {
    std::string out;
    out += "\\ railnet network design model\n";
    out += "\\ big_m " + std::to_string(model.big_m) + "\n";
    out += "Minimize\n";
    LineWriter w(out);
    w.start(" obj:");
    std::vector<LinearTerm> objective;
    for (const auto& v : model.variables())
        if (v.objective != 0.0) objective.push_back({v.id, v.objective});
    write_terms(w, objective, model);
    if (model.objective_offset != 0.0 || objective.empty()) {
        const double c = model.objective_offset;
        if (objective.empty())
            w.token(number(c));
        else
            w.token((c < 0 ? "- " : "+ ") + number(std::abs(c)));
    }
    w.end();
    out += "Subject To\n";
    for (const auto& c : model.constraints()) {
        w.start(" " + c.name + ":");
        if (c.terms.empty())
            w.token("0");
        else
            write_terms(w, c.terms, model);
        w.token(std::string(sense_text(c.sense)) + " " + number(c.rhs));
        w.end();
    }
    out += "Bounds\n";
    for (const auto& v : model.variables())
        out += " " + number(v.lower) + " <= " + v.name + " <= " + number(v.upper) + "\n";
    std::string binaries, generals;
    for (const auto& v : model.variables())
        (v.domain == VariableDomain::Binary ? binaries : generals) += " " + v.name + "\n";
    if (!binaries.empty()) out += "Binaries\n" + binaries;
    if (!generals.empty()) out += "Generals\n" + generals;
    out += "End\n";
    return out;
}

namespace {

struct Token {
    std::string text;
    int line;
};

enum class Part { None, Objective, Constraints, Bounds, Binaries, Generals, End };

std::optional<Part> section_keyword(const std::vector<Token>& toks, std::size_t i, std::size_t& consumed) {
    auto lower = [&](std::size_t k) {
        std::string s = toks[k].text;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    const std::string t = lower(i);
    consumed = 1;
    if (t == "minimize" || t == "minimise" || t == "minimum" || t == "min") return Part::Objective;
    if (t == "subject" || t == "such") {
        if (i + 1 < toks.size() && lower(i + 1) == (t == "subject" ? "to" : "that")) {
            consumed = 2;
            return Part::Constraints;
        }
        return std::nullopt;
    }
    if (t == "st" || t == "s.t.") return Part::Constraints;
    if (t == "bounds" || t == "bound") return Part::Bounds;
    if (t == "binaries" || t == "binary" || t == "bin") return Part::Binaries;
    if (t == "generals" || t == "general" || t == "gen" || t == "integers") return Part::Generals;
    if (t == "end") return Part::End;
    if (t == "maximize" || t == "maximise" || t == "maximum" || t == "max")
        throw ParseError(toks[i].line, "maximisation models are not supported");
    return std::nullopt;
}

struct RawRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    ConstraintSense sense = ConstraintSense::LessEqual;
    double rhs = 0.0;
};

std::optional<ConstraintSense> sense_of(const std::string& t) {
    if (t == "<=" || t == "=<" || t == "<") return ConstraintSense::LessEqual;
    if (t == ">=" || t == "=>" || t == ">") return ConstraintSense::GreaterEqual;
    if (t == "=") return ConstraintSense::Equal;
    return std::nullopt;
}

/// Whitespace tokens; bound lines are kept whole and marked by a placeholder token.
std::vector<Token> tokenize(std::string_view text, std::vector<std::string>& bound_lines,
                            std::vector<int>& bound_line_numbers, Minutes& big_m) {
    std::vector<Token> toks;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool in_bounds = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto bs = line.find('\\');
        if (bs != std::string::npos) {
            std::istringstream comment(line.substr(bs + 1));
            std::string key;
            long long value = 0;
            if (comment >> key && key == "big_m" && comment >> value) big_m = static_cast<Minutes>(value);
            line.erase(bs);
        }
        std::istringstream ls(line);
        std::vector<std::string> words;
        std::string w;
        while (ls >> w) words.push_back(w);
        if (words.empty()) continue;
        // Bounds are line oriented; every other section is a token stream.
        std::string first = words[0];
        std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
        const bool keyword = first == "bounds" || first == "bound" || first == "binaries" || first == "binary" ||
                             first == "bin" || first == "generals" || first == "general" || first == "gen" ||
                             first == "integers" || first == "end" || first == "subject" || first == "st" ||
                             first == "minimize" || first == "minimise" || first == "min";
        if (keyword) in_bounds = first == "bounds" || first == "bound";
        if (in_bounds && !keyword) {
            bound_lines.push_back(line);
            bound_line_numbers.push_back(lineno);
            toks.push_back({"\x01bound", lineno});
            continue;
        }
        for (const auto& word : words) toks.push_back({word, lineno});
    }
    return toks;
}

double parse_bound_value(const std::string& tok, int line) {
    auto v = parse_number(tok);
    if (!v) throw ParseError(line, "malformed bound value '" + tok + "'");
    return *v;
}

}  // namespace

MilpModel parse_model_text(std::string_view text) {
    std::vector<std::string> bound_lines;
    std::vector<int> bound_line_numbers;
    Minutes big_m = 0;
    const auto toks = tokenize(text, bound_lines, bound_line_numbers, big_m);

    std::vector<std::string> order;  // variable names by first appearance
    std::set<std::string> known;
    auto note = [&](const std::string& name) {
        if (known.insert(name).second) order.push_back(name);
    };
    std::vector<std::string> bound_order;
    std::map<std::string, std::pair<double, double>> bounds;
    std::set<std::string> binaries, generals;
    std::vector<std::pair<std::string, double>> objective;
    double offset = 0.0;
    std::vector<RawRow> rows;

    Part section = Part::None;
    std::size_t i = 0;
    std::size_t bound_index = 0;
    bool saw_end = false;

    // Reads "[+|-] [coef] name" sequences until a sense operator or section keyword.
    auto read_expression = [&](std::vector<std::pair<std::string, double>>& terms, double& constant,
                               bool allow_sense) {
        double sign = 1.0;
        bool has_coef = false;
        double coef = 1.0;
        while (i < toks.size()) {
            std::size_t consumed = 0;
            const std::string& t = toks[i].text;
            if (t == "\x01bound" || section_keyword(toks, i, consumed)) break;
            if (allow_sense && sense_of(t)) break;
            if (t == "+" || t == "-") {
                if (has_coef) {
                    constant += sign * coef;
                    has_coef = false;
                    coef = 1.0;
                    sign = 1.0;
                }
                if (t == "-") sign = -sign;
                ++i;
                continue;
            }
            if (!allow_sense && t.back() == ':' && t.size() > 1) throw ParseError(toks[i].line, "unexpected row name");
            if (auto v = parse_number(t)) {
                if (has_coef) throw ParseError(toks[i].line, "two consecutive numbers");
                has_coef = true;
                coef = *v;
                ++i;
                continue;
            }
            if (allow_sense && t.back() == ':') break;  // next row name
            if (t.front() == '-' || t.front() == '+') {
                // glued sign such as "-x"
                sign *= t.front() == '-' ? -1.0 : 1.0;
                const std::string name = t.substr(1);
                if (auto v = parse_number(name)) {
                    has_coef = true;
                    coef = *v;
                    ++i;
                    continue;
                }
                terms.push_back({name, sign * coef});
            } else {
                terms.push_back({t, sign * coef});
            }
            note(terms.back().first);
            has_coef = false;
            coef = 1.0;
            sign = 1.0;
            ++i;
        }
        if (has_coef) constant += sign * coef;
    };

    while (i < toks.size()) {
        std::size_t consumed = 0;
        if (toks[i].text == "\x01bound") {
            if (section != Part::Bounds) throw ParseError(toks[i].line, "bound outside Bounds section");
            const std::string& line = bound_lines[bound_index];
            const int lineno = bound_line_numbers[bound_index];
            ++bound_index;
            ++i;
            std::istringstream ls(line);
            std::vector<std::string> w;
            std::string word;
            while (ls >> word) w.push_back(word);
            std::string name;
            double lo = 0.0, hi = std::numeric_limits<double>::infinity();
            bool set_lo = false, set_hi = false;
            if (w.size() == 5 && sense_of(w[1]) && sense_of(w[3])) {
                name = w[2];
                lo = parse_bound_value(w[0], lineno);
                hi = parse_bound_value(w[4], lineno);
                set_lo = set_hi = true;
            } else if (w.size() == 3 && sense_of(w[1])) {
                name = w[0];
                const double v = parse_bound_value(w[2], lineno);
                switch (*sense_of(w[1])) {
                    case ConstraintSense::LessEqual: hi = v; set_hi = true; break;
                    case ConstraintSense::GreaterEqual: lo = v; set_lo = true; break;
                    case ConstraintSense::Equal: lo = hi = v; set_lo = set_hi = true; break;
                }
            } else if (w.size() == 2) {
                std::string kw = w[1];
                std::transform(kw.begin(), kw.end(), kw.begin(), [](unsigned char c) { return std::tolower(c); });
                if (kw != "free") throw ParseError(lineno, "malformed bound");
                name = w[0];
                lo = -std::numeric_limits<double>::infinity();
                set_lo = set_hi = true;
            } else {
                throw ParseError(lineno, "malformed bound");
            }
            note(name);
            if (!bounds.count(name)) bound_order.push_back(name);
            auto& b = bounds.try_emplace(name, 0.0, std::numeric_limits<double>::infinity()).first->second;
            if (set_lo) b.first = lo;
            if (set_hi) b.second = hi;
            continue;
        }
        if (auto s = section_keyword(toks, i, consumed)) {
            section = *s;
            i += consumed;
            if (section == Part::End) {
                saw_end = true;
                break;
            }
            continue;
        }
        switch (section) {
            case Part::None: throw ParseError(toks[i].line, "expected Minimize");
            case Part::Objective: {
                if (toks[i].text.back() == ':') ++i;
                read_expression(objective, offset, false);
                break;
            }
            case Part::Constraints: {
                RawRow row;
                const int line = toks[i].line;
                if (toks[i].text.back() == ':' && toks[i].text.size() > 1) {
                    row.name = toks[i].text.substr(0, toks[i].text.size() - 1);
                    ++i;
                } else {
                    row.name = "R" + std::to_string(rows.size() + 1);
                }
                double constant = 0.0;
                read_expression(row.terms, constant, true);
                if (i >= toks.size() || !sense_of(toks[i].text))
                    throw ParseError(line, "constraint " + row.name + " lacks a sense");
                row.sense = *sense_of(toks[i].text);
                ++i;
                double sign = 1.0;
                if (i < toks.size() && (toks[i].text == "-" || toks[i].text == "+")) {
                    sign = toks[i].text == "-" ? -1.0 : 1.0;
                    ++i;
                }
                if (i >= toks.size()) throw ParseError(line, "constraint " + row.name + " lacks a right-hand side");
                auto rhs = parse_number(toks[i].text);
                if (!rhs) throw ParseError(toks[i].line, "malformed right-hand side '" + toks[i].text + "'");
                ++i;
                row.rhs = sign * *rhs - constant;
                rows.push_back(std::move(row));
                break;
            }
            case Part::Binaries:
                note(toks[i].text);
                binaries.insert(toks[i].text);
                ++i;
                break;
            case Part::Generals:
                note(toks[i].text);
                generals.insert(toks[i].text);
                ++i;
                break;
            case Part::Bounds:
            case Part::End: throw ParseError(toks[i].line, "unexpected token '" + toks[i].text + "'");
        }
    }
    if (!saw_end) throw ParseError(toks.empty() ? 1 : toks.back().line, "missing End");

    // Bounds order first so emitted models keep their variable ids.
    std::vector<std::string> ids = bound_order;
    std::set<std::string> placed(ids.begin(), ids.end());
    for (const auto& n : order)
        if (placed.insert(n).second) ids.push_back(n);

    MilpModel model;
    model.big_m = big_m;
    model.objective_offset = offset;
    for (const auto& name : ids) {
        VariableDomain domain;
        if (binaries.count(name))
            domain = VariableDomain::Binary;
        else if (generals.count(name))
            domain = VariableDomain::Integer;
        else
            throw ParseError(0, "continuous variable " + name + " is not supported");
        double lo = 0.0;
        double hi = domain == VariableDomain::Binary ? 1.0 : std::numeric_limits<double>::infinity();
        if (auto it = bounds.find(name); it != bounds.end()) {
            lo = it->second.first;
            hi = it->second.second;
        }
        try {
            model.add_variable(name, domain, lo, hi);
        } catch (const BuildError& e) {
            throw ParseError(0, e.what());
        }
    }
    std::vector<double> obj(ids.size(), 0.0);
    for (const auto& [name, c] : objective) obj[model.require(name)] += c;
    for (std::size_t j = 0; j < obj.size(); ++j) model.set_objective_coefficient(static_cast<int>(j), obj[j]);
    for (auto& row : rows) {
        LinearConstraint c;
        c.name = row.name;
        const auto us = row.name.rfind('_');
        c.tag = us == std::string::npos ? row.name : row.name.substr(0, us);
        for (const auto& [name, coef] : row.terms) {
            const int id = model.require(name);
            auto it = std::find_if(c.terms.begin(), c.terms.end(), [&](const LinearTerm& t) { return t.variable == id; });
            if (it == c.terms.end())
                c.terms.push_back({id, coef});
            else
                it->coefficient += coef;
        }
        c.sense = row.sense;
        c.rhs = row.rhs;
        model.add_named_constraint(std::move(c));
    }
    return model;
}

MilpSolution import_solution(std::string_view text, const MilpModel& model) {
    MilpSolution out;
    out.values.assign(model.variables().size(), 0.0);
    std::vector<char> seen(model.variables().size(), 0);
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string name, value, extra;
        if (!(ls >> name)) continue;
        if (!(ls >> value) || (ls >> extra)) throw ParseError(lineno, "expected '<name> <value>'");
        auto v = parse_number(value);
        if (!v || !std::isfinite(*v)) throw ParseError(lineno, "malformed value '" + value + "'");
        auto id = model.find(name);
        if (!id) throw ParseError(lineno, "unknown variable " + name);
        if (seen[*id]) throw ParseError(lineno, "duplicate value for " + name);
        seen[*id] = 1;
        out.values[*id] = *v;
    }
    int missing = 0;
    for (std::size_t j = 0; j < seen.size(); ++j)
        if (!seen[j]) ++missing;
    if (missing > 0)
        out.warnings.push_back(std::to_string(missing) + " variables missing from the solution were set to 0");
    const double violation = model.max_violation(out.values);
    if (violation > 1e-6)
        out.warnings.push_back("imported solution violates the model by " + number(violation));
    out.status = SolveStatus::Feasible;
    out.objective = model.evaluate_objective(out.values);
    out.best_bound = out.objective;
    out.gap_percent = 0.0;
    return out;
}

std::string format_solution(const MilpSolution& solution, const MilpModel& model) {
    std::string out = "# status " + std::string(to_string(solution.status)) + "\n";
    if (!solution.has_solution()) return out;
    out += "# objective " + number(solution.objective) + "\n";
    for (const auto& v : model.variables()) out += v.name + " " + number(solution.values.at(v.id)) + "\n";
    return out;
}

}  // namespace railnet
