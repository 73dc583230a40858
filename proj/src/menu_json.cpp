#include "scrambler/menu_json.hpp"

#include <string>

#include "scrambler/errors.hpp"

namespace scrambler {

using nlohmann::json;

CouplingMenu menu_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("menu must be a JSON object");
    CouplingMenu menu;
    if (auto it = doc.find("intra"); it != doc.end()) {
        if (!it->is_object()) throw ValidationError("menu.intra must be an object keyed by q");
        for (const auto& [key, value] : it->items()) {
            int q = 0;
            try {
                std::size_t used = 0;
                q = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ValidationError("menu.intra key '" + key + "' is not an integer");
            }
            if (!value.is_number()) throw ValidationError("menu.intra[" + key + "] must be a number");
            menu.intra[q] = value.get<double>();
        }
    }
    if (auto it = doc.find("cross"); it != doc.end()) {
        if (!it->is_array()) throw ValidationError("menu.cross must be an array");
        for (const auto& term : *it) {
            if (!term.is_object() || !term.contains("p") || !term.contains("u"))
                throw ValidationError("menu.cross entries need fields 'p' and 'u'");
            const auto& p = term.at("p");
            if (!p.is_array() || p.size() != 4)
                throw ValidationError("menu.cross[].p must be an array of 4 integers");
            CrossKey key;
            for (std::size_t l = 0; l < 4; ++l) {
                if (!p[l].is_number_integer())
                    throw ValidationError("menu.cross[].p must be an array of 4 integers");
                key.p[l] = p[l].get<int>();
            }
            if (!term.at("u").is_number()) throw ValidationError("menu.cross[].u must be a number");
            if (menu.cross.count(key))
                throw ValidationError("menu.cross lists " + key.label() + " twice");
            menu.cross[key] = term.at("u").get<double>();
        }
    }
    for (const auto& [key, value] : doc.items())
        if (key != "intra" && key != "cross")
            throw ValidationError("unknown menu field '" + key + "'");
    require_valid(menu);
    return menu;
}

json menu_to_json(const CouplingMenu& menu) {
    json doc = json::object();
    json intra = json::object();
    for (const auto& [q, j] : menu.intra) intra[std::to_string(q)] = j;
    json cross = json::array();
    for (const auto& [k, u] : menu.cross)
        cross.push_back({{"p", {k.p[0], k.p[1], k.p[2], k.p[3]}}, {"u", u}});
    doc["intra"] = intra;
    doc["cross"] = cross;
    return doc;
}

Filling filling_from_json(const json& doc) {
    bool has_n = doc.contains("n");
    bool has_mu = doc.contains("mu");
    if (has_n == has_mu) throw ValidationError("specify exactly one of 'n' or 'mu'");
    if (has_n) {
        if (!doc["n"].is_number()) throw ValidationError("'n' must be a number");
        return Filling::from_density(doc["n"].get<double>());
    }
    if (!doc["mu"].is_number()) throw ValidationError("'mu' must be a number");
    return Filling::from_mu(doc["mu"].get<double>());
}

}  // namespace scrambler
