import type { EntityCard } from "./types.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Render one entity card. Everything is plain text on purpose: the IRI and
 * property values are never links, so an annotator judges the cards alone. */
export function renderCard(card: EntityCard | null, side: "source" | "target"): HTMLElement {
  const box = el("div", `card card-${side}`);
  if (!card) {
    box.appendChild(el("p", "card-missing", "no card for this entity"));
    return box;
  }

  const head = el("div", "card-head");
  head.appendChild(el("h3", "card-label", card.label));
  head.appendChild(el("span", "card-kind", card.kind ?? "unknown"));
  box.appendChild(head);
  box.appendChild(el("p", "card-iri", card.iri));

  if (card.alt_labels.length > 0) {
    box.appendChild(el("p", "card-alts", `also known as: ${card.alt_labels.join(", ")}`));
  }

  const table = document.createElement("table");
  table.className = "card-props";
  for (const [property, value] of card.properties) {
    const row = document.createElement("tr");
    row.appendChild(el("td", "prop-name", property));
    row.appendChild(el("td", "prop-value", value));
    table.appendChild(row);
  }
  box.appendChild(table);
  return box;
}
