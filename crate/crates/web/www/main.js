import init, { roundtrip, chase_tgds, catalog } from './pkg/backchase_web.js';

const $ = id => document.getElementById(id);
const EXAMPLES = ['join', 'merge_column', 'merge_table'];

function instanceText(inst) {
  const cell = v => ('const' in v ? v.const : '⊥' + v.null);
  return inst.relations
    .map(r => `${r.name}(${r.attributes.join(', ')})\n` +
      r.tuples.map(t => `  ${t.id}: ${t.values.map(cell).join(', ')}`).join('\n'))
    .join('\n');
}

function fail(el, e) {
  el.innerHTML = '';
  const span = document.createElement('span');
  span.className = 'err';
  span.textContent = String(e);
  el.appendChild(span);
}

async function loadExample(name) {
  const get = f => fetch(`examples/${name}_${f}.json`).then(r => r.text());
  $('rt-instance').value = await get('source');
  $('rt-script').value = await get('script');
}

function runRoundtrip() {
  const resources = JSON.stringify({
    provenance: $('rt-mode').value,
    side_tables: $('rt-side').checked,
    inverse_functions: $('rt-finv').checked,
  });
  try {
    const out = JSON.parse(roundtrip($('rt-instance').value, $('rt-script').value, resources));
    const steps = out.report.steps
      .map(s => `step ${s.index} ${s.kind}: ${s.step_type} (predicted ${s.classification.predicted})`)
      .join('<br>');
    $('rt-summary').innerHTML =
      `${steps}<br><b>composed ${out.report.composed}</b>, end to end ${out.report.end_to_end.type}`;
    $('rt-target').textContent = instanceText(out.target);
    $('rt-reconstructed').textContent = instanceText(out.reconstructed);
  } catch (e) {
    fail($('rt-summary'), e);
    $('rt-target').textContent = $('rt-reconstructed').textContent = '';
  }
}

function runChase() {
  try {
    const out = JSON.parse(chase_tgds($('rt-instance').value, $('ch-tgds').value, $('ch-mode').value));
    const notes = out.provenance.annotations
      .map(a => `  ${a.id}: ${a.how ?? a.why?.map(w => '{' + w.join(',') + '}').join(' ') ?? a.where ?? ''}`)
      .join('\n');
    $('ch-out').textContent = instanceText(out.target) + (notes ? '\nprovenance\n' + notes : '');
  } catch (e) {
    fail($('ch-out'), e);
  }
}

function fillCatalog() {
  const body = $('catalog').querySelector('tbody');
  for (const e of JSON.parse(catalog())) {
    const tr = document.createElement('tr');
    for (const text of [e.kind, e.classes.join('/'), e.inverse_operator,
                        e.forward.join('\n'), e.inverse_with_provenance.join('\n')]) {
      const td = document.createElement('td');
      td.style.whiteSpace = 'pre';
      td.textContent = text;
      tr.appendChild(td);
    }
    body.appendChild(tr);
  }
}

await init();
for (const name of EXAMPLES) $('rt-example').add(new Option(name));
$('rt-example').onchange = () => loadExample($('rt-example').value);
$('rt-run').onclick = runRoundtrip;
$('ch-run').onclick = runChase;
fillCatalog();
await loadExample(EXAMPLES[0]);
runRoundtrip();
