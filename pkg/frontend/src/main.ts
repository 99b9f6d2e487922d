import { ApiClient } from './api.js'
import { App } from './app.js'
import { mount } from './dom.js'

const app = new App(new ApiClient(''))
mount(app, document.getElementById('app')!)
void app.refreshAll()
