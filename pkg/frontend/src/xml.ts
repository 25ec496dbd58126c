// Minimal XML reader for the service's machine-generated documents:
// elements, attributes, text, self-closing tags, the five standard
// entities. No namespaces, CDATA or doctypes (the API never emits them).

export interface XmlNode {
  tag: string;
  attrs: Record<string, string>;
  children: XmlNode[];
  text: string;
}

const ENTITIES: Record<string, string> = {
  "&amp;": "&",
  "&lt;": "<",
  "&gt;": ">",
  "&quot;": '"',
  "&apos;": "'",
};

function decode(value: string): string {
  return value.replace(/&(amp|lt|gt|quot|apos);/g, (m) => ENTITIES[m]);
}

export function parseXml(input: string): XmlNode {
  let pos = 0;
  const len = input.length;

  function skipMisc(): void {
    for (;;) {
      while (pos < len && /\s/.test(input[pos])) pos++;
      if (input.startsWith("<?", pos)) {
        pos = input.indexOf("?>", pos) + 2;
      } else if (input.startsWith("<!--", pos)) {
        pos = input.indexOf("-->", pos) + 3;
      } else {
        return;
      }
    }
  }

  function parseAttrs(): Record<string, string> {
    const attrs: Record<string, string> = {};
    for (;;) {
      while (pos < len && /\s/.test(input[pos])) pos++;
      if (input[pos] === ">" || input.startsWith("/>", pos)) return attrs;
      const eq = input.indexOf("=", pos);
      const name = input.slice(pos, eq).trim();
      const quote = input[eq + 1];
      const end = input.indexOf(quote, eq + 2);
      attrs[name] = decode(input.slice(eq + 2, end));
      pos = end + 1;
    }
  }

  function parseElement(): XmlNode {
    if (input[pos] !== "<") throw new Error(`expected '<' at ${pos}`);
    pos++;
    const nameEnd = pos + input.slice(pos).search(/[\s/>]/);
    const tag = input.slice(pos, nameEnd);
    pos = nameEnd;
    const attrs = parseAttrs();
    const node: XmlNode = { tag, attrs, children: [], text: "" };
    if (input.startsWith("/>", pos)) {
      pos += 2;
      return node;
    }
    pos++; // consume '>'
    for (;;) {
      if (input.startsWith("</", pos)) {
        pos = input.indexOf(">", pos) + 1;
        return node;
      }
      if (input.startsWith("<!--", pos)) {
        pos = input.indexOf("-->", pos) + 3;
        continue;
      }
      if (input[pos] === "<") {
        node.children.push(parseElement());
      } else {
        const next = input.indexOf("<", pos);
        node.text += decode(input.slice(pos, next === -1 ? len : next));
        pos = next === -1 ? len : next;
      }
    }
  }

  skipMisc();
  const root = parseElement();
  return root;
}

export function escapeXml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
