// SPDX-License-Identifier: MIT
#pragma once

// File formats: model / density / ensemble JSON, convergence and prediction
// CSV, purity JSON, and data CSV. Numbers are written with 17 significant
// digits so every double round-trips exactly.

#include "fanova/bins.hpp"
#include "fanova/density.hpp"
#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/purify.hpp"
#include "fanova/tensor.hpp"
#include "fanova/trees.hpp"
#include "fanova/weights.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fanova {

using Json = nlohmann::json;

/// Shortest form of `value` printed with 17 significant digits.
inline std::string format_number(double value) {
    if (!std::isfinite(value)) throw DomainError("cannot serialize a non-finite number");
    if (value == 0.0) return std::signbit(value) ? "-0.0" : "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string quote(const std::string& s) { return Json(s).dump(); }

namespace detail {

inline void write_nested(std::ostream& out, const Tensor& t, std::size_t axis, std::size_t& flat) {
    if (axis == t.rank()) {
        out << format_number(t[flat++]);
        return;
    }
    out << '[';
    for (std::size_t k = 0; k < t.shape()[axis]; ++k) {
        if (k) out << ", ";
        write_nested(out, t, axis + 1, flat);
    }
    out << ']';
}

inline std::string nested(const Tensor& t) {
    std::ostringstream out;
    std::size_t flat = 0;
    write_nested(out, t, 0, flat);
    return out.str();
}

inline std::string vars_array(const Vars& vars) {
    std::string s = "[";
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (k) s += ", ";
        s += quote(vars[k]);
    }
    return s + "]";
}

inline double json_number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw DomainError(what + ": expected a number");
    return j.get<double>();
}

/// Reads a nested array of rank `rank`, inferring (or checking) the shape.
inline void read_nested(const Json& j, std::size_t axis, std::size_t rank, std::vector<std::size_t>& shape,
                        std::vector<double>& values, const std::string& what) {
    if (axis == rank) {
        values.push_back(json_number(j, what));
        return;
    }
    if (!j.is_array()) throw DomainError(what + ": expected a nested array of depth " + std::to_string(rank));
    if (shape.size() == axis) {
        shape.push_back(j.size());
    } else if (shape[axis] != j.size()) {
        throw DomainError(what + ": ragged nested array");
    }
    for (const auto& item : j) read_nested(item, axis + 1, rank, shape, values, what);
}

inline Tensor read_tensor(const Json& j, std::size_t rank, const std::string& what) {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    read_nested(j, 0, rank, shape, values, what);
    if (shape.size() < rank) shape.resize(rank, 0);
    return Tensor(std::move(shape), std::move(values));
}

inline Vars read_vars(const Json& j, const std::string& what) {
    if (!j.is_array()) throw DomainError(what + ": \"vars\" must be an array of names");
    Vars vars;
    for (const auto& v : j) {
        if (!v.is_string()) throw DomainError(what + ": \"vars\" entries must be strings");
        vars.push_back(v.get<std::string>());
    }
    return vars;
}

inline Json parse_json(std::istream& in, const std::string& what) {
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DomainError(what + ": " + e.what());
    }
}

}  // namespace detail

// ---- model JSON ----------------------------------------------------------

inline void write_model_json(std::ostream& out, const AdditiveModel& model) {
    out << "{\n  \"features\": [";
    bool first = true;
    for (const auto& [name, fb] : model.bins()) {
        out << (first ? "\n" : ",\n") << "    {\"name\": " << quote(name) << ", \"kind\": \"" << to_string(fb.kind())
            << "\", ";
        if (fb.is_continuous()) {
            out << "\"edges\": [";
            for (std::size_t k = 0; k < fb.edges().size(); ++k) out << (k ? ", " : "") << format_number(fb.edges()[k]);
        } else {
            out << "\"labels\": [";
            for (std::size_t k = 0; k < fb.labels().size(); ++k) out << (k ? ", " : "") << quote(fb.labels()[k]);
        }
        out << "]}";
        first = false;
    }
    out << (first ? "" : "\n  ") << "],\n  \"effects\": [";
    first = true;
    for (const auto& [vars, effect] : model.effects()) {
        out << (first ? "\n" : ",\n") << "    {\"vars\": " << detail::vars_array(vars)
            << ", \"values\": " << detail::nested(effect.values) << "}";
        first = false;
    }
    out << "\n  ]\n}\n";
}

inline std::string model_to_json(const AdditiveModel& model) {
    std::ostringstream out;
    write_model_json(out, model);
    return out.str();
}

inline AdditiveModel model_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("features") || !j.contains("effects")) {
        throw DomainError("model JSON needs \"features\" and \"effects\"");
    }
    AdditiveModel model;
    for (const auto& f : j.at("features")) {
        if (!f.contains("name") || !f.contains("kind")) throw DomainError("feature entry needs \"name\" and \"kind\"");
        const auto name = f.at("name").get<std::string>();
        const auto kind = f.at("kind").get<std::string>();
        if (kind == "continuous") {
            std::vector<double> edges;
            for (const auto& e : f.value("edges", Json::array())) edges.push_back(detail::json_number(e, "edges of " + name));
            model.add_feature(FeatureBins::continuous(name, std::move(edges)));
        } else if (kind == "categorical") {
            model.add_feature(FeatureBins::categorical(name, f.value("labels", Json::array()).get<std::vector<std::string>>()));
        } else {
            throw DomainError("feature '" + name + "' has unknown kind '" + kind + "'");
        }
    }
    std::set<Vars> seen;
    for (const auto& e : j.at("effects")) {
        if (!e.contains("vars") || !e.contains("values")) throw DomainError("effect entry needs \"vars\" and \"values\"");
        Vars vars = detail::read_vars(e.at("vars"), "effect");
        const std::string what = "effect (" + join_vars(vars, ", ") + ")";
        if (!seen.insert(vars).second) throw DomainError(what + " appears twice");
        Tensor values = detail::read_tensor(e.at("values"), vars.size(), what);
        model.set_effect({std::move(vars), std::move(values)});
    }
    return model;
}

inline AdditiveModel read_model_json(std::istream& in) {
    try {
        return model_from_json(detail::parse_json(in, "model JSON"));
    } catch (const Json::exception& e) {
        throw DomainError(std::string("model JSON: ") + e.what());
    }
}

inline AdditiveModel model_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_model_json(in);
}

// ---- density JSON --------------------------------------------------------

inline void write_density_json(std::ostream& out, const WeightDensity& w, const std::string& mode) {
    out << "{\n  \"mode\": " << quote(mode) << ",\n  \"densities\": [";
    bool first = true;
    for (const auto& [vars, weights] : w.tensors()) {
        out << (first ? "\n" : ",\n") << "    {\"vars\": " << detail::vars_array(vars)
            << ", \"values\": " << detail::nested(weights) << "}";
        first = false;
    }
    out << "\n  ]\n}\n";
}

inline WeightDensity read_density_json(std::istream& in) {
    try {
        const Json j = detail::parse_json(in, "density JSON");
        if (!j.is_object() || !j.contains("densities")) throw DomainError("density JSON needs \"densities\"");
        WeightDensity w;
        for (const auto& e : j.at("densities")) {
            Vars vars = detail::read_vars(e.at("vars"), "density");
            Tensor values = detail::read_tensor(e.at("values"), vars.size(), "density (" + join_vars(vars, ", ") + ")");
            w.insert(std::move(vars), std::move(values));
        }
        return w;
    } catch (const Json::exception& e) {
        throw DomainError(std::string("density JSON: ") + e.what());
    }
}

// ---- ensemble JSON -------------------------------------------------------

namespace detail {

inline Tree read_tree(const Json& node, std::size_t depth) {
    if (depth > 64) throw DomainError("ensemble JSON: tree nesting too deep");
    if (!node.is_object()) throw DomainError("ensemble JSON: tree node must be an object");
    if (node.contains("leaf")) return Tree::leaf(json_number(node.at("leaf"), "leaf"));
    if (!node.contains("split") || !node.contains("threshold") || !node.contains("left") || !node.contains("right")) {
        throw DomainError("ensemble JSON: split node needs \"split\", \"threshold\", \"left\", \"right\"");
    }
    Threshold threshold;
    const Json& t = node.at("threshold");
    if (t.is_number()) {
        threshold = t.get<double>();
    } else if (t.is_object() && t.contains("labels")) {
        threshold = t.at("labels").get<std::vector<std::string>>();
    } else {
        throw DomainError("ensemble JSON: threshold must be a number or {\"labels\": [...]}");
    }
    return Tree::split(node.at("split").get<std::string>(), std::move(threshold), read_tree(node.at("left"), depth + 1),
                       read_tree(node.at("right"), depth + 1));
}

inline void write_tree(std::ostream& out, const Tree& tree, std::size_t k) {
    const auto& n = tree.node(k);
    if (n.is_leaf) {
        out << "{\"leaf\": " << format_number(n.value) << "}";
        return;
    }
    out << "{\"split\": " << quote(n.feature) << ", \"threshold\": ";
    if (const double* x = std::get_if<double>(&n.threshold)) {
        out << format_number(*x);
    } else {
        out << "{\"labels\": [";
        const auto& labels = std::get<std::vector<std::string>>(n.threshold);
        for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? ", " : "") << quote(labels[i]);
        out << "]}";
    }
    out << ", \"left\": ";
    write_tree(out, tree, n.left);
    out << ", \"right\": ";
    write_tree(out, tree, n.right);
    out << "}";
}

}  // namespace detail

inline TreeEnsemble read_ensemble_json(std::istream& in) {
    try {
        const Json j = detail::parse_json(in, "ensemble JSON");
        if (!j.is_object() || !j.contains("trees")) throw DomainError("ensemble JSON needs \"trees\"");
        TreeEnsemble ensemble;
        ensemble.base_score = j.contains("base_score") ? detail::json_number(j.at("base_score"), "base_score") : 0.0;
        for (const auto& t : j.at("trees")) ensemble.trees.push_back(detail::read_tree(t, 0));
        return ensemble;
    } catch (const Json::exception& e) {
        throw DomainError(std::string("ensemble JSON: ") + e.what());
    }
}

inline void write_ensemble_json(std::ostream& out, const TreeEnsemble& ensemble) {
    out << "{\"base_score\": " << format_number(ensemble.base_score) << ", \"trees\": [";
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t) {
        out << (t ? ",\n  " : "\n  ");
        detail::write_tree(out, ensemble.trees[t], 0);
    }
    out << "\n]}\n";
}

// ---- reports -------------------------------------------------------------

/// tensor_vars,iteration,mass; vars joined with '*'.
inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
    out << "tensor_vars,iteration,mass\n";
    for (const auto& r : reports) {
        for (const auto& s : r.trace) out << join_vars(r.vars) << ',' << s.iteration << ',' << format_number(s.mass) << '\n';
    }
}

inline void write_purity_json(std::ostream& out, const PurityReport& report) {
    out << "{\n  \"pass\": " << (report.pass ? "true" : "false") << ",\n  \"tol\": " << format_number(report.tol)
        << ",\n  \"max_abs_slice_mean\": " << format_number(report.max_abs_slice_mean) << ",\n  \"tensors\": [";
    bool first = true;
    for (const auto& e : report.entries) {
        out << (first ? "\n" : ",\n") << "    {\"vars\": " << detail::vars_array(e.vars)
            << ", \"max_abs_slice_mean\": " << format_number(e.max_abs_slice_mean)
            << ", \"degenerate_slices\": " << e.degenerate_slices << ", \"pass\": " << (e.pass ? "true" : "false") << "}";
        first = false;
    }
    out << (first ? "" : "\n  ") << "]\n}\n";
}

// ---- data CSV ------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                field += '"';
                ++k;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    if (quoted) throw DomainError("data CSV: unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

inline double parse_decimal(const std::string& text, const std::string& what) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin < end && text[begin] == '+') ++begin;
    double value = 0.0;
    auto res = std::from_chars(text.data() + begin, text.data() + end, value);
    if (begin == end || res.ec != std::errc{} || res.ptr != text.data() + end || !std::isfinite(value)) {
        throw DomainError(what + ": '" + text + "' is not a finite decimal");
    }
    return value;
}

}  // namespace detail

/// Reads a header row of names then one record per line. Columns naming a
/// continuous feature in `bins` are parsed as decimals; everything else is
/// kept as a raw label. Blank fields are rejected.
inline GridDataset read_data_csv(std::istream& in, const BinRegistry& bins) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("data CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto columns = detail::split_csv_line(line);
    std::vector<bool> numeric(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        auto it = bins.find(columns[c]);
        numeric[c] = it != bins.end() && it->second.is_continuous();
    }
    std::vector<std::vector<FeatureValue>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != columns.size()) {
            throw DomainError("data CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(columns.size()) + " fields, got " + std::to_string(fields.size()));
        }
        std::vector<FeatureValue> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string what = "data CSV line " + std::to_string(line_no) + ", column '" + columns[c] + "'";
            if (fields[c].empty()) throw DomainError(what + ": missing value");
            if (numeric[c]) {
                row.emplace_back(detail::parse_decimal(fields[c], what));
            } else {
                row.emplace_back(std::move(fields[c]));
            }
        }
        rows.push_back(std::move(row));
    }
    return GridDataset(columns, std::move(rows));
}

inline void write_predictions_csv(std::ostream& out, const std::vector<double>& predictions) {
    out << "prediction\n";
    for (double p : predictions) out << format_number(p) << '\n';
}

}  // namespace fanova
