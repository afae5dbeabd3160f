#pragma once

#include "scicheck/term.hpp"

#include <set>
#include <string>
#include <tuple>
#include <utility>

namespace scicheck {

// Opaque identifier of a source medium.
using MediaId = std::string;
using Provenance = std::set<MediaId>;

// (subject, predicate, object) plus the media it was derived from.
// Identity ignores provenance.
struct Triple {
    Term subject;
    Term predicate;
    Term object;
    Provenance provenance;

    Triple() = default;
    Triple(Term s, Term p, Term o, Provenance prov = {})
        : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)),
          provenance(std::move(prov)) {}

    // Normalizing constructor from raw surface strings.
    static Triple of(std::string_view s, std::string_view p, std::string_view o,
                     Provenance prov = {}) {
        return Triple(entity(s), ::scicheck::predicate(p), entity(o), std::move(prov));
    }

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
    }
    friend bool operator<(const Triple& a, const Triple& b) {
        return std::tie(a.subject, a.predicate, a.object) <
               std::tie(b.subject, b.predicate, b.object);
    }
};

// "<s>|<p>|<o>" key used by the provenance sidecar.
inline std::string provenance_key(const Triple& t) {
    return t.subject.text() + "|" + t.predicate.text() + "|" + t.object.text();
}

}  // namespace scicheck
