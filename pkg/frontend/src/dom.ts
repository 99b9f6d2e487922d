// Browser shell: binds the view model to real DOM nodes. Nothing here
// computes state; it renders what view() returns and forwards events to
// the App controller.

import { App } from './app.js'
import { Tab } from './state.js'
import { view } from './view.js'

export function mount(app: App, root: HTMLElement): void {
  app.subscribe(() => render(app, root))
  render(app, root)

  // deep links like #list open the matching tab
  const fromHash = location.hash.replace('#', '') as Tab
  if (['category', 'product', 'new', 'list'].includes(fromHash)) {
    app.setTab(fromHash)
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  Object.assign(node, props)
  node.append(...children)
  return node
}

function render(app: App, root: HTMLElement): void {
  const vm = view(app.state)
  const s = app.state
  root.replaceChildren(
    el('nav', {}, vm.tabs.map((t) =>
      el('button', {
        textContent: t.label,
        className: t.active ? 'tab active' : 'tab',
        onclick: () => {
          location.hash = t.id
          app.setTab(t.id)
        },
      }),
    )),
    el('div', { className: 'sync-bar' }, [
      el('input', {
        placeholder: 'remote sync URL',
        value: s.remoteUrl,
        oninput: function (this: HTMLInputElement) {
          app.setRemoteUrl(this.value)
        } as any,
      }),
      el('button', { textContent: vm.syncButton, onclick: () => void app.runSync() }),
    ]),
    vm.notice ? el('div', { className: 'banner', textContent: vm.notice }) : '',
    renderTab(app, vm),
  )
}

function renderTab(app: App, vm: ReturnType<typeof view>): HTMLElement {
  const s = app.state
  const error = vm.formError ? el('p', { className: 'error', textContent: vm.formError }) : ''
  switch (s.activeTab) {
    case 'category':
      return el('section', {}, [
        el('ul', {}, vm.categoryNames.map((n) => el('li', { textContent: n }))),
        el('input', {
          value: s.categoryForm.name,
          oninput: function (this: HTMLInputElement) {
            app.setCategoryName(this.value)
          } as any,
        }),
        el('button', { textContent: 'Add', onclick: () => void app.submitCategory() }),
        error,
      ])
    case 'product':
      return el('section', {}, [
        el('input', {
          placeholder: 'name',
          value: s.productForm.name,
          oninput: function (this: HTMLInputElement) {
            app.patchProductForm({ name: this.value })
          } as any,
        }),
        el('input', {
          placeholder: 'price',
          value: s.productForm.price,
          oninput: function (this: HTMLInputElement) {
            app.patchProductForm({ price: this.value })
          } as any,
        }),
        el('select', {
          value: s.productForm.categoryId,
          onchange: function (this: HTMLSelectElement) {
            app.patchProductForm({ categoryId: this.value })
          } as any,
        }, [
          el('option', { value: '', textContent: '(no category)' }),
          ...s.categories.map((c) =>
            el('option', { value: String(c.id), textContent: c.name }),
          ),
        ]),
        el('label', {}, [
          el('input', {
            type: 'checkbox',
            checked: s.productForm.favorite,
            onchange: function (this: HTMLInputElement) {
              app.patchProductForm({ favorite: this.checked })
            } as any,
          }),
          'favorite',
        ]),
        el('button', { textContent: 'Add', onclick: () => void app.submitProduct() }),
        error,
      ])
    case 'new':
      return el('section', {}, [
        el('label', {}, [
          el('input', {
            type: 'checkbox',
            checked: vm.favoritesOnly,
            onchange: function (this: HTMLInputElement) {
              app.setFavoritesOnly(this.checked)
            } as any,
          }),
          'Show favorites',
        ]),
        el('ul', {}, vm.productRows.map((p) =>
          el('li', {}, [
            `${p.name} ${p.price}${p.favorite ? ' *' : ''} `,
            el('button', {
              textContent: 'add to list',
              onclick: () => void app.addToList(p.id),
            }),
          ]),
        )),
        el('button', { textContent: 'New list', onclick: () => void app.newList() }),
      ])
    case 'list':
      return el('section', {}, [
        el('ul', {}, vm.listRows.map((row) =>
          el('li', {
            textContent: row.label,
            style: `color: ${row.color}` as any,
            onclick: () => void app.toggleItem(row.id),
          }),
        )),
      ])
  }
}
