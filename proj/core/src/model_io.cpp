#include "hawkes/model_io.hpp"

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"

#include <json.hpp>

namespace hawkes {

using nlohmann::json;

namespace {

json kernel_to_json(const KernelSpec& spec) {
  json out{{"type", kernel_type_name(spec)}};
  if (const auto* p = std::get_if<PowerLawKernel>(&spec)) {
    out["amplitude"] = p->amplitude;
    out["offset"] = p->offset;
    out["exponent"] = p->exponent;
  } else if (const auto* e = std::get_if<ExponentialKernel>(&spec)) {
    out["branching"] = e->branching;
    out["rate"] = e->rate;
  } else {
    const auto& t = std::get<TabulatedKernel>(spec);
    out["abscissae"] = t.abscissae();
    out["values"] = t.values();
  }
  return out;
}

KernelSpec kernel_from_json(const json& block) {
  const auto type = block.at("type").get<std::string>();
  if (type == "power_law") {
    return PowerLawKernel{block.at("amplitude").get<double>(), block.at("offset").get<double>(),
                          block.at("exponent").get<double>()};
  }
  if (type == "exponential") {
    return ExponentialKernel{block.at("branching").get<double>(), block.at("rate").get<double>()};
  }
  if (type == "tabulated") {
    return TabulatedKernel(block.at("abscissae").get<std::vector<double>>(),
                           block.at("values").get<std::vector<double>>());
  }
  fail(ErrorKind::Format, "unknown kernel type '" + type + "'");
}

}  // namespace

std::string write_model(const HawkesModel& model) {
  json doc;
  doc["format"] = "hawkes-model";
  doc["version"] = 1;
  doc["dimension"] = model.dimension();
  doc["labels"] = model.labels();
  doc["mode"] = to_string(model.mode());
  doc["mu"] = model.mu();
  json kernels = json::array();
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    for (std::size_t j = 0; j < model.dimension(); ++j) {
      json block = kernel_to_json(model.kernel(i, j));
      block["target"] = model.labels()[i];
      block["source"] = model.labels()[j];
      kernels.push_back(std::move(block));
    }
  }
  doc["kernels"] = std::move(kernels);
  return doc.dump(2) + "\n";
}

HawkesModel read_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    require(doc.value("format", std::string()) == "hawkes-model", ErrorKind::Format,
            "model file: missing format tag 'hawkes-model'");
    const auto labels = doc.at("labels").get<std::vector<std::string>>();
    const std::size_t d = labels.size();
    require(doc.value("dimension", d) == d, ErrorKind::Format,
            "model file: dimension does not match labels");
    const auto mu = doc.at("mu").get<std::vector<double>>();
    const Mode mode = parse_mode(doc.value("mode", std::string("linear")));
    std::vector<KernelSpec> kernels(d * d, zero_kernel());
    std::vector<bool> seen(d * d, false);
    auto index_of = [&](const std::string& label) {
      for (std::size_t k = 0; k < d; ++k) {
        if (labels[k] == label) return k;
      }
      fail(ErrorKind::Format, "model file: unknown label '" + label + "' in kernel block");
    };
    for (const auto& block : doc.at("kernels")) {
      const std::size_t i = index_of(block.at("target").get<std::string>());
      const std::size_t j = index_of(block.at("source").get<std::string>());
      require(!seen[i * d + j], ErrorKind::Format, "model file: duplicate kernel block");
      seen[i * d + j] = true;
      kernels[i * d + j] = kernel_from_json(block);
    }
    return HawkesModel(labels, mu, std::move(kernels), mode);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("model file: ") + e.what());
  }
}

void save_model(const HawkesModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, write_model(model));
}

HawkesModel load_model(const std::filesystem::path& path) { return read_model(read_file(path)); }

std::string model_hash(const HawkesModel& model) { return hex64(fnv1a64(write_model(model))); }

}  // namespace hawkes
