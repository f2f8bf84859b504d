#include "tracegym/tensor_io.hpp"

#include <cmath>
#include <fstream>

#include "tracegym/errors.hpp"

namespace tracegym {
namespace {

std::vector<std::int64_t> dims_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw IoError(std::string("tensor JSON needs an integer array '") + key + "'");
    }
    std::vector<std::int64_t> dims;
    for (const auto& d : j.at(key)) {
        if (!d.is_number_integer()) {
            throw IoError(std::string("tensor JSON '") + key + "' must hold integers");
        }
        dims.push_back(d.get<std::int64_t>());
    }
    return dims;
}

std::vector<double> part_from_json(const nlohmann::json& j, const char* key,
                                   std::size_t expected) {
    if (!j.contains(key)) {
        return std::vector<double>(expected, 0.0);
    }
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != expected) {
        throw IoError(std::string("tensor JSON '") + key + "' must be an array of " +
                      std::to_string(expected) + " numbers");
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw IoError(std::string("tensor JSON '") + key + "' must hold numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

nlohmann::ordered_json tensor_to_json(const DenseTensor& a) {
    nlohmann::ordered_json j;
    j["row_dims"] = a.shape().row_dims;
    j["col_dims"] = a.shape().col_dims;
    std::vector<double> re(static_cast<std::size_t>(a.size()));
    std::vector<double> im(static_cast<std::size_t>(a.size()));
    for (std::int64_t i = 0; i < a.size(); ++i) {
        re[static_cast<std::size_t>(i)] = a[i].real();
        im[static_cast<std::size_t>(i)] = a[i].imag();
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

DenseTensor tensor_from_json(const nlohmann::json& j) {
    Shape shape(dims_from_json(j, "row_dims"), dims_from_json(j, "col_dims"));
    DenseTensor t(shape);
    const auto n = static_cast<std::size_t>(t.size());
    const std::vector<double> re = part_from_json(j, "re", n);
    const std::vector<double> im = part_from_json(j, "im", n);
    for (std::size_t i = 0; i < n; ++i) {
        t[static_cast<std::int64_t>(i)] = cplx(re[i], im[i]);
    }
    if (!t.all_finite()) {
        throw IoError("tensor JSON holds non-finite entries");
    }
    return t;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

DenseTensor load_tensor(const std::string& path) {
    return tensor_from_json(load_json_file(path));
}

void save_tensor(const std::string& path, const DenseTensor& a) {
    save_json_file(path, tensor_to_json(a));
}

} // namespace tracegym
