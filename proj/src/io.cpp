#include "tspmdf/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tspmdf/errors.hpp"
#include "tspmdf/rng.hpp"

namespace tspmdf {

namespace {

constexpr char kCheckpointMagic[8] = {'T', 'S', 'P', 'M', 'D', 'F', 'C', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double_token(const std::string& tok, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": '" + tok +
                         "' is not a number");
    return v;
}

long parse_int_token(const std::string& tok, int line_no) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": '" + tok +
                         "' is not an integer");
    return v;
}

void put_f64le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("failed reading " + path);
    return std::move(buf).str();
}

}  // namespace

TspInstance parse_tsplib(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    std::string name, type, edge_weight_type;
    long dimension = -1;
    bool saw_section = false;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line == "NODE_COORD_SECTION") {
            saw_section = true;
            break;
        }
        if (line == "EOF")
            throw ParseError("line " + std::to_string(line_no) +
                             ": EOF before NODE_COORD_SECTION");
        std::size_t colon = line.find(':');
        std::string key = trim(colon == std::string::npos ? line : line.substr(0, colon));
        std::string value = colon == std::string::npos ? "" : trim(line.substr(colon + 1));
        if (key == "NAME") {
            name = value;
        } else if (key == "TYPE") {
            type = value;
        } else if (key == "DIMENSION") {
            dimension = parse_int_token(value, line_no);
        } else if (key == "EDGE_WEIGHT_TYPE") {
            edge_weight_type = value;
        } else if (colon == std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": unrecognized '" + line +
                             "'");
        }
        // Other "KEY : value" headers (COMMENT etc.) are ignored.
    }

    if (!saw_section) throw ParseError("missing NODE_COORD_SECTION");
    if (type != "TSP") throw ParseError("TYPE must be TSP, got '" + type + "'");
    if (edge_weight_type != "EUC_2D" && edge_weight_type != "CEIL_2D")
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + edge_weight_type + "'");
    if (dimension < 0) throw ParseError("missing DIMENSION");
    if (dimension < 3) throw ParseError("DIMENSION must be at least 3, got " +
                                        std::to_string(dimension));

    TspInstance inst;
    inst.name = name;
    inst.xy.reserve(2 * static_cast<std::size_t>(dimension));
    long read_count = 0;
    while (read_count < dimension) {
        if (!std::getline(in, raw))
            throw ParseError("DIMENSION says " + std::to_string(dimension) + " nodes but only " +
                             std::to_string(read_count) + " coordinate lines are present");
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::vector<std::string> tok = split_ws(line);
        if (tok.size() != 3)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 'index x y', got '" + line + "'");
        long idx = parse_int_token(tok[0], line_no);
        if (idx != read_count + 1)
            throw ParseError("line " + std::to_string(line_no) + ": expected node index " +
                             std::to_string(read_count + 1) + ", got " + std::to_string(idx));
        inst.xy.push_back(parse_double_token(tok[1], line_no));
        inst.xy.push_back(parse_double_token(tok[2], line_no));
        ++read_count;
    }
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line == "EOF") continue;
        throw ParseError("line " + std::to_string(line_no) +
                         ": unexpected content after the coordinate section: '" + line + "'");
    }
    require_valid_instance(inst);
    return inst;
}

TspInstance read_tsplib_file(const std::string& path) {
    try {
        return parse_tsplib(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string serialize_tsplib(const TspInstance& inst) {
    require_valid_instance(inst);
    std::string out;
    out += "NAME : " + (inst.name.empty() ? std::string("unnamed") : inst.name) + "\n";
    out += "TYPE : TSP\n";
    out += "DIMENSION : " + std::to_string(inst.node_count()) + "\n";
    out += "EDGE_WEIGHT_TYPE : EUC_2D\n";
    out += "NODE_COORD_SECTION\n";
    char buf[80];
    for (int i = 0; i < inst.node_count(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g\n", i + 1, inst.x(i), inst.y(i));
        out += buf;
    }
    out += "EOF\n";
    return out;
}

void write_tsplib_file(const TspInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << serialize_tsplib(inst);
    if (!out.good()) throw IoError("failed writing " + path);
}

TspInstance generate_uniform(int n, std::uint64_t seed, std::uint64_t index) {
    if (n < 3) throw DomainError("an instance needs at least 3 nodes, got " + std::to_string(n));
    Rng rng = Rng(seed).stream(index);
    TspInstance inst;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "u%d-s%llu-i%05llu", n,
                  static_cast<unsigned long long>(seed), static_cast<unsigned long long>(index));
    inst.name = buf;
    inst.xy.resize(2 * static_cast<std::size_t>(n));
    for (double& c : inst.xy) c = rng.next_double();
    return inst;
}

namespace {

nlohmann::json tensor_manifest(const ModelParams& params) {
    nlohmann::json manifest = nlohmann::json::array();
    for_each_tensor(params, [&manifest](const char* tensor_name, const Mat& t) {
        manifest.push_back({{"name", tensor_name}, {"rows", t.rows}, {"cols", t.cols}});
    });
    return manifest;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const OptimizerState& opt, int k) {
    std::vector<const Mat*> tensors;
    for_each_tensor(params, [&tensors](const char*, const Mat& t) { tensors.push_back(&t); });
    if (opt.m.size() != tensors.size() || opt.v.size() != tensors.size())
        throw StructuralError("optimizer state does not match the parameter manifest");

    nlohmann::json header = {
        {"format_version", kCheckpointVersion},
        {"hidden", params.hidden},
        {"layers", params.layers},
        {"digits", params.digits},
        {"k", k},
        {"head", params.head == HeadKind::kCategorical ? "categorical" : "gaussian"},
        {"optimizer",
         {{"lr", opt.lr},
          {"weight_decay", opt.weight_decay},
          {"beta1", opt.beta1},
          {"beta2", opt.beta2},
          {"eps", opt.eps},
          {"step", opt.step}}},
        {"tensors", tensor_manifest(params)},
    };
    std::string header_text = header.dump();

    std::string blob;
    blob.append(kCheckpointMagic, sizeof(kCheckpointMagic));
    put_u32le(blob, kCheckpointVersion);
    put_u32le(blob, static_cast<std::uint32_t>(header_text.size()));
    blob += header_text;
    for (const Mat* t : tensors)
        for (double v : t->a) put_f64le(blob, v);
    for (const Mat& t : opt.m)
        for (double v : t.a) put_f64le(blob, v);
    for (const Mat& t : opt.v)
        for (double v : t.a) put_f64le(blob, v);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out.good()) throw IoError("failed writing " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    const std::string blob = read_file(path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    if (blob.size() < 16) throw IoError(path + ": truncated checkpoint");
    if (std::memcmp(blob.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
        throw ParseError(path + ": not a checkpoint file");
    std::uint32_t version = get_u32le(bytes + 8);
    if (version != kCheckpointVersion)
        throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
    std::uint64_t header_len = get_u32le(bytes + 12);
    if (blob.size() < 16 + header_len) throw IoError(path + ": truncated checkpoint header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(blob.substr(16, header_len));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": corrupt checkpoint header: " + e.what());
    }

    LoadedCheckpoint loaded;
    try {
        if (header.at("format_version").get<std::uint32_t>() != version)
            throw ParseError(path + ": header/container version disagreement");
        int hidden = header.at("hidden").get<int>();
        int layers = header.at("layers").get<int>();
        int digits = header.at("digits").get<int>();
        loaded.k = header.at("k").get<int>();
        std::string head_name = header.at("head").get<std::string>();
        HeadKind head;
        if (head_name == "categorical") {
            head = HeadKind::kCategorical;
        } else if (head_name == "gaussian") {
            head = HeadKind::kGaussian;
        } else {
            throw ParseError(path + ": unknown head kind '" + head_name + "'");
        }
        loaded.params = init_model(hidden, layers, digits, head, 0);

        const auto& opt_json = header.at("optimizer");
        loaded.opt = init_optimizer(loaded.params, opt_json.at("lr").get<double>(),
                                    opt_json.at("weight_decay").get<double>());
        loaded.opt.beta1 = opt_json.at("beta1").get<double>();
        loaded.opt.beta2 = opt_json.at("beta2").get<double>();
        loaded.opt.eps = opt_json.at("eps").get<double>();
        loaded.opt.step = opt_json.at("step").get<long long>();

        std::vector<Mat*> tensors;
        for_each_tensor(loaded.params,
                        [&tensors](const char*, Mat& t) { tensors.push_back(&t); });
        const auto& manifest = header.at("tensors");
        if (manifest.size() != tensors.size())
            throw ParseError(path + ": checkpoint manifest lists " +
                             std::to_string(manifest.size()) + " tensors, model has " +
                             std::to_string(tensors.size()));
        std::size_t total = 0;
        nlohmann::json expected = tensor_manifest(loaded.params);
        for (std::size_t idx = 0; idx < tensors.size(); ++idx) {
            if (manifest.at(idx) != expected.at(idx))
                throw ParseError(path + ": manifest entry " + std::to_string(idx) +
                                 " does not match this model layout");
            total += tensors[idx]->size();
        }

        std::size_t expected_payload = total * 3 * 8;
        if (blob.size() != 16 + header_len + expected_payload)
            throw IoError(path + ": checkpoint payload is " +
                          std::to_string(blob.size() - 16 - header_len) + " bytes, expected " +
                          std::to_string(expected_payload));

        const unsigned char* p = bytes + 16 + header_len;
        for (Mat* t : tensors)
            for (double& v : t->a) v = get_f64le(std::exchange(p, p + 8));
        for (Mat& t : loaded.opt.m)
            for (double& v : t.a) v = get_f64le(std::exchange(p, p + 8));
        for (Mat& t : loaded.opt.v)
            for (double& v : t.a) v = get_f64le(std::exchange(p, p + 8));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": corrupt checkpoint header: " + e.what());
    }
    return loaded;
}

}  // namespace tspmdf
